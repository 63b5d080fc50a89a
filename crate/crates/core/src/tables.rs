//! Published parameter presets and constants, and their recomputation.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{assemble, derive_d, validate, ConstantTriple, DTriple, SearchPoint};
use crate::error::{Error, Result};
use crate::kappa::KappaSet;
use crate::precision::PrecisionConfig;

const PUBLISHED_TOML: &str = include_str!("../data/published.toml");

/// Absolute agreement required per constant.
pub const TABLE_TOL: f64 = 2e-5;
/// How far a computed constant may sit above the published one.
pub const MAX_EXCESS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub row: u32,
    pub c: String,
    pub r: String,
    pub eta: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedTriple {
    pub row: u32,
    pub t0: u32,
    pub c: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedD {
    pub label: String,
    pub row: u32,
    pub t0: u32,
    pub d: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Published {
    pub schema: u32,
    pub j1: u32,
    pub j2: u32,
    pub preset: Vec<Preset>,
    pub c_triple: Vec<PublishedTriple>,
    pub d_triple: Vec<PublishedD>,
}

impl Published {
    pub fn preset(&self, row: u32) -> Result<&Preset> {
        self.preset
            .iter()
            .find(|p| p.row == row)
            .ok_or_else(|| Error::Domain(format!("no preset row {row} (rows are 1-{})", self.preset.len())))
    }

    pub fn triple(&self, row: u32, t0: u32) -> Option<ConstantTriple> {
        self.c_triple
            .iter()
            .find(|t| t.row == row && t.t0 == t0)
            .map(|t| ConstantTriple {
                c1: t.c[0],
                c2: t.c[1],
                c3: t.c[2],
            })
    }
}

/// The embedded golden data.
pub fn published() -> &'static Published {
    static DATA: OnceLock<Published> = OnceLock::new();
    DATA.get_or_init(|| toml::from_str(PUBLISHED_TOML).expect("embedded table data parses"))
}

impl Preset {
    pub fn point(&self, t0: u32, prec: &PrecisionConfig) -> Result<SearchPoint> {
        let data = published();
        SearchPoint::parse(
            &self.c,
            &self.r,
            &self.eta,
            data.j1,
            data.j2,
            &t0.to_string(),
            prec,
        )
    }
}

/// Comparison rule for one constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub max_excess: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: TABLE_TOL,
            max_excess: MAX_EXCESS,
        }
    }
}

impl Tolerance {
    /// A single override; the excess limit never loosens past the default.
    pub fn override_abs(abs: f64) -> Self {
        Tolerance {
            abs,
            max_excess: abs.min(MAX_EXCESS),
        }
    }

    pub fn accepts(&self, computed: f64, published: f64) -> bool {
        (computed - published).abs() <= self.abs && computed - published <= self.max_excess
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub row: u32,
    pub t0: u32,
    pub computed: ConstantTriple,
    pub published: ConstantTriple,
    pub ok: [bool; 3],
}

impl TripleCheck {
    pub fn passed(&self) -> bool {
        self.ok.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DCheck {
    pub label: String,
    pub row: u32,
    pub t0: u32,
    pub computed: DTriple,
    pub published: DTriple,
    pub ok: [bool; 3],
}

impl DCheck {
    pub fn passed(&self) -> bool {
        self.ok.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub tolerance: Tolerance,
    pub triples: Vec<TripleCheck>,
    pub d_rows: Vec<DCheck>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.triples.iter().all(TripleCheck::passed) && self.d_rows.iter().all(DCheck::passed)
    }
}

/// Recomputes every published triple at the requested heights, then the
/// D-rows from the recomputed (not the published) triples.
pub fn reproduce(t0s: &[u32], tol: Tolerance, prec: &PrecisionConfig) -> Result<TableReport> {
    let data = published();
    // The kappas do not depend on T0, so each row is integrated once.
    let per_row: Vec<Vec<TripleCheck>> = data
        .preset
        .par_iter()
        .map(|preset| -> Result<Vec<TripleCheck>> {
            let base = preset.point(1, prec)?;
            let violations = validate(&base);
            if !violations.is_empty() {
                return Err(Error::Constraint(violations));
            }
            let kappas = KappaSet::compute(
                &base.circle()?,
                &base.eta,
                base.j1,
                base.j2,
                &base.grid()?,
                prec,
            )?;
            let mut out = Vec::new();
            for &t0 in t0s {
                let Some(published) = data.triple(preset.row, t0) else {
                    continue;
                };
                let point = SearchPoint {
                    t0: prec.float(t0),
                    ..base.clone()
                };
                let computed = assemble(&point, &kappas, prec)?.triple;
                let ok = [
                    tol.accepts(computed.c1, published.c1),
                    tol.accepts(computed.c2, published.c2),
                    tol.accepts(computed.c3, published.c3),
                ];
                out.push(TripleCheck {
                    row: preset.row,
                    t0,
                    computed,
                    published,
                    ok,
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let triples: Vec<TripleCheck> = per_row.into_iter().flatten().collect();

    let mut d_rows = Vec::new();
    for expected in &data.d_triple {
        let Some(source) = triples
            .iter()
            .find(|t| t.row == expected.row && t.t0 == expected.t0)
        else {
            continue;
        };
        let computed = derive_d(&source.computed, f64::from(expected.t0))?;
        let published = DTriple {
            d1: expected.d[0],
            d2: expected.d[1],
            d3: expected.d[2],
        };
        let ok = [
            computed.d1 == published.d1,
            computed.d2 == published.d2,
            computed.d3 == published.d3,
        ];
        d_rows.push(DCheck {
            label: expected.label.clone(),
            row: expected.row,
            t0: expected.t0,
            computed,
            published,
            ok,
        });
    }
    Ok(TableReport {
        tolerance: tol,
        triples,
        d_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_is_complete() {
        let d = published();
        assert_eq!(d.schema, 1);
        assert_eq!((d.j1, d.j2), (64, 39));
        assert_eq!(d.preset.len(), 5);
        assert_eq!(d.c_triple.len(), 10);
        assert_eq!(d.d_triple.len(), 9);
        assert_eq!(d.preset(1).unwrap().eta, "4.2826451e-6");
        assert!(d.preset(6).is_err());
        for row in 1..=5 {
            let (a, b) = (d.triple(row, 1).unwrap(), d.triple(row, 10).unwrap());
            assert_eq!(a.c1, b.c1);
            assert!(b.c2 < a.c2 && b.c3 < a.c3);
        }
    }

    #[test]
    fn tolerance_rule_is_asymmetric() {
        let t = Tolerance::default();
        assert!(t.accepts(1.0, 1.0));
        assert!(t.accepts(1.0 - 1.9e-5, 1.0));
        assert!(!t.accepts(1.0 - 2.1e-5, 1.0));
        assert!(t.accepts(1.0 + 0.9e-5, 1.0));
        assert!(!t.accepts(1.0 + 1.1e-5, 1.0));
        let tight = Tolerance::override_abs(1e-9);
        assert!(!tight.accepts(1.0 + 1e-8, 1.0));
    }

    #[test]
    fn presets_parse_at_full_precision() {
        let prec = PrecisionConfig::default();
        let p = published().preset(1).unwrap().point(10, &prec).unwrap();
        assert_eq!(p.eta, prec.parse("4.2826451e-6").unwrap());
        assert_eq!(p.t0, 10);
        assert!(validate(&p).is_empty());
    }
}
