//! Self-verification: the closed forms and bounds checked against
//! independent numerical oracles.

use std::f64::consts::PI;

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::constants::{compute_constants, SearchPoint};
use crate::error::Result;
use crate::gamma::{e_k, ek_simplified_bound, SignatureSplit};
use crate::geometry::{l_kernel, l_star, CircleParams};
use crate::kappa::{kappa2, kappa3, zeta_int_bound_first, zeta_int_bound_second, KappaSet, THETA_LIMIT};
use crate::precision::{ratio, PrecisionConfig};
use crate::quadrature::quad_adaptive;
use crate::tables::published;
use crate::zeta::{log_zeta_real, zeta_real};

/// Closed form against quadrature.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// Target error of every oracle quadrature.
pub const QUAD_TOL: f64 = 1e-12;
/// Slack allowed in the zeta-integral inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-12;
/// Signature splits `(n_K, r1, r2)` exercised by the gamma checks.
pub const SPLITS: [(u32, u32, u32); 4] = [(1, 1, 0), (2, 0, 1), (3, 1, 1), (10, 0, 5)];
/// Heights used by the gamma checks.
pub const GAMMA_HEIGHTS: [&str; 4] = ["5/7", "1", "10", "100"];

/// `gamma_1` in `zeta(1 + e) = 1/e + gamma - gamma_1 e + O(e^2)`.
const STIELTJES_1: f64 = -0.072_815_845_483_676_724_86;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Value under test.
    pub value: f64,
    /// What it was compared with.
    pub reference: f64,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, value: f64, reference: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            value,
            reference,
            detail: detail.into(),
        }
    }

    fn close(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let diff = (value - reference).abs();
        Check::new(name, diff <= tol, value, reference, format!("|diff| = {diff:.3e}, tol {tol:.0e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Every published parameter row, at `T0 = 1`.
pub fn table_points(prec: &PrecisionConfig) -> Result<Vec<(u32, SearchPoint)>> {
    published()
        .preset
        .iter()
        .map(|p| Ok((p.row, p.point(1, prec)?)))
        .collect()
}

fn lstar_f64(j: f64, theta: f64, c: f64, r: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    2.0 * r * s - 4.0 + 7.0 / 19.0 * ((j + c + r * co).powi(2) + (r * s - 2.0).powi(2))
}

fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    Ok(quad_adaptive(f, a, b, QUAD_TOL)?.value)
}

/// Closed-form kappas and `L*` integrals against quadrature of the defining
/// integrands. `weight` replaces the `L*` weight in the closed forms only.
pub fn closed_form_checks(
    label: &str,
    point: &SearchPoint,
    weight: Option<&Float>,
    prec: &PrecisionConfig,
) -> Result<Vec<Check>> {
    let circ = point.circle()?;
    let grid = point.grid()?;
    let kappas = match weight {
        None => KappaSet::compute(&circ, &point.eta, point.j1, point.j2, &grid, prec)?,
        Some(w) => KappaSet::compute_with_weight(&circ, &point.eta, point.j1, point.j2, &grid, prec, w)?,
    };
    let (c, r, eta) = (point.c.to_f64(), point.r.to_f64(), point.eta.to_f64());
    let (t1, tm, th) = (
        grid.theta_1_plus_eta.to_f64(),
        grid.theta_minus_eta.to_f64(),
        grid.theta_minus_half.to_f64(),
    );
    let sigma = |t: f64| c + r * t.cos();

    let k1 = quad(|t| (1.0 + eta - sigma(t)) / 2.0, t1, tm)? + quad(|t| (1.0 - 2.0 * sigma(t)) / 2.0, tm, PI)?;
    let k4 = quad(|t| (1.0 + eta - sigma(t)) * lstar_f64(1.0, t, c, r), t1, tm)? / 4.0;
    let k5 = quad(|t| (1.0 - 2.0 * sigma(t)) * lstar_f64(1.0, t, c, r), tm, th)? / 4.0;
    let first = quad(|t| lstar_f64(-1.0, t, c, r), 0.0, t1)?;
    let mid = quad(|t| lstar_f64(1.0, t, c, r), t1, tm)?;
    let last = quad(|t| lstar_f64(-1.0, t, c, r), tm, PI)?;

    let pairs = [
        ("kappa1", &kappas.kappa1, k1),
        ("kappa4", &kappas.kappa4, k4),
        ("kappa5", &kappas.kappa5, k5),
        ("lstar_int_first", &kappas.lstar_int_first, first),
        ("lstar_int_mid", &kappas.lstar_int_mid, mid),
        ("lstar_int_last", &kappas.lstar_int_last, last),
    ];
    Ok(pairs
        .into_iter()
        .map(|(name, closed, q)| {
            Check::close(format!("{label}/{name} closed form vs quadrature"), closed.to_f64(), q, CLOSED_FORM_TOL)
        })
        .collect())
}

/// Oracle precision for integrands that call the zeta engine at every node.
fn oracle_precision() -> PrecisionConfig {
    PrecisionConfig::new(25, 1e-22).expect("valid oracle precision")
}

/// The two zeta-integral bounds against quadrature of `log zeta(sigma)` and
/// `log zeta(1 - sigma)`, after checking `theta_{1+eta} <= 2.1`.
pub fn zeta_int_checks(label: &str, point: &SearchPoint, prec: &PrecisionConfig) -> Result<Vec<Check>> {
    let circ = point.circle()?;
    let grid = point.grid()?;
    let theta = grid.theta_1_plus_eta.to_f64();
    let mut out = vec![Check::new(
        format!("{label}/theta_1_plus_eta <= 2.1"),
        grid.theta_1_plus_eta <= THETA_LIMIT,
        theta,
        THETA_LIMIT,
        "hypothesis of the zeta-integral bounds",
    )];
    if !out[0].passed {
        return Ok(out);
    }
    let bound1 = zeta_int_bound_first(&circ, &point.eta, point.j1, &grid, prec)?.to_f64();
    let bound2 = zeta_int_bound_second(&circ, &point.eta, point.j2, &grid, prec)?.to_f64();

    let oracle = oracle_precision();
    let bits = oracle.bits();
    let (c, r) = (Float::with_val(bits, &point.c), Float::with_val(bits, &point.r));
    let mut failure = None;
    let mut log_zeta_at = |flip: bool, t: f64| -> f64 {
        let cos = Float::with_val(bits, t).cos();
        let sigma = cos * &r + &c;
        let arg = if flip { Float::with_val(bits, 1u32 - &sigma) } else { sigma };
        match log_zeta_real(&arg, &oracle) {
            Ok(v) => v.to_f64(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let int1 = quad_adaptive(|t| log_zeta_at(false, t), 0.0, theta, QUAD_TOL);
    let int2 = quad_adaptive(|t| log_zeta_at(true, t), grid.theta_minus_eta.to_f64(), PI, QUAD_TOL);
    if let Some(e) = failure {
        return Err(e);
    }
    let (int1, int2) = (int1?.value, int2?.value);
    for (name, integral, bound) in [
        ("int_0^theta(1+eta) log zeta(sigma)", int1, bound1),
        ("int_theta(-eta)^pi log zeta(1-sigma)", int2, bound2),
    ] {
        out.push(Check::new(
            format!("{label}/{name} <= bound"),
            integral <= bound + INEQUALITY_SLACK,
            integral,
            bound,
            format!("margin {:.3e}", bound - integral),
        ));
    }
    Ok(out)
}

/// Successive changes of `kappa2`, `kappa3` shrink as `J` doubles from 8 to 128.
pub fn riemann_sum_checks(label: &str, point: &SearchPoint, prec: &PrecisionConfig) -> Result<Vec<Check>> {
    let circ = point.circle()?;
    let grid = point.grid()?;
    let js = [8u32, 16, 32, 64, 128];
    let mut out = Vec::new();
    for which in ["kappa2", "kappa3"] {
        let values = js
            .iter()
            .map(|&j| {
                let v = if which == "kappa2" {
                    kappa2(j, &circ, prec)?
                } else {
                    kappa3(j, &circ, &grid, prec)?
                };
                Ok(v.to_f64())
            })
            .collect::<Result<Vec<f64>>>()?;
        let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let shrinking = steps.windows(2).all(|s| s[1] < s[0]);
        out.push(Check::new(
            format!("{label}/{which} stabilises as J doubles"),
            shrinking,
            steps[steps.len() - 1],
            steps[0],
            format!(
                "changes {}",
                steps.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>().join(", ")
            ),
        ));
    }
    Ok(out)
}

/// `L_j <= L*_j / (T + 2)` on a 40 x 25 grid of `(theta, T)` for `j = -1, 1`.
pub fn kernel_majorant_check(label: &str, point: &SearchPoint, prec: &PrecisionConfig) -> Result<Check> {
    let circ = CircleParams::new(
        Float::with_val(prec.bits(), &point.c),
        Float::with_val(prec.bits(), &point.r),
    )?;
    let bits = prec.bits();
    // Log-spaced from 5/7 to 1000.
    let lo = ratio(5, 7, bits).ln();
    let hi = Float::with_val(bits, 1000u32).ln();
    let heights: Vec<Float> = (0..25u32)
        .map(|i| {
            let x = Float::with_val(bits, &hi - &lo) * i / 24u32 + &lo;
            x.exp()
        })
        .collect();
    let mut worst = f64::INFINITY;
    let mut worst_at = (0.0, 0.0, 0);
    for k in 0..40u32 {
        let theta = Float::with_val(bits, Constant::Pi) * k / 39u32;
        for j in [-1, 1] {
            let star = l_star(j, &theta, &circ)?;
            for t in &heights {
                let lhs = l_kernel(j, &theta, &circ, t)?;
                let rhs = Float::with_val(bits, &star / Float::with_val(bits, t + 2u32));
                let margin = (rhs - lhs).to_f64();
                if margin < worst {
                    worst = margin;
                    worst_at = (theta.to_f64(), t.to_f64(), j);
                }
            }
        }
    }
    Ok(Check::new(
        format!("{label}/L_j <= L*_j/(T+2) on 1000-point grid"),
        worst >= 0.0,
        worst,
        0.0,
        format!(
            "smallest margin {worst:.3e} at theta={:.4}, T={:.4}, j={}",
            worst_at.0, worst_at.1, worst_at.2
        ),
    ))
}

fn parse_height(s: &str, prec: &PrecisionConfig) -> Result<Float> {
    match s.split_once('/') {
        Some((n, d)) => Ok(prec.parse(n)? / prec.parse(d)?),
        None => prec.parse(s),
    }
}

/// `E_K(T, d) > 0` and nondecreasing in `d` on `d = 0, 0.01, ..., 0.49`, and
/// the simplified bound dominating `E_K / pi` on `d in [1/4, 1/2)`.
pub fn gamma_checks(prec: &PrecisionConfig) -> Result<Vec<Check>> {
    let bits = prec.bits();
    let mut out = Vec::new();
    for (n_k, r1, r2) in SPLITS {
        let split = SignatureSplit::new(r1, r2)?;
        debug_assert_eq!(split.degree(), n_k);
        let mut min_value = f64::INFINITY;
        let mut monotone = true;
        let mut min_slack = f64::INFINITY;
        for h in GAMMA_HEIGHTS {
            let t = parse_height(h, prec)?;
            let mut previous: Option<Float> = None;
            for k in 0..=49u32 {
                let d = Float::with_val(bits, k) / 100u32;
                let e = e_k(split, &t, &d)?;
                min_value = min_value.min(e.to_f64());
                if let Some(p) = &previous {
                    monotone &= e >= *p;
                }
                if k >= 25 {
                    let simplified = ek_simplified_bound(split, &t, &d)?;
                    let scaled = Float::with_val(bits, &e / Float::with_val(bits, Constant::Pi));
                    min_slack = min_slack.min((simplified - scaled).to_f64());
                }
                previous = Some(e);
            }
        }
        let tag = format!("E_K split (r1={r1}, r2={r2})");
        out.push(Check::new(format!("{tag} positive"), min_value > 0.0, min_value, 0.0, "minimum over the grid"));
        out.push(Check::new(
            format!("{tag} nondecreasing in d"),
            monotone,
            f64::from(u8::from(monotone)),
            1.0,
            "d = 0, 0.01, ..., 0.49 at each height",
        ));
        out.push(Check::new(
            format!("{tag} simplified bound dominates E_K/pi"),
            min_slack >= 0.0,
            min_slack,
            0.0,
            "smallest slack over d in [1/4, 1/2)",
        ));
    }
    Ok(out)
}

/// `zeta(2)`, `zeta(4)` to `1e-30` and `zeta(1 + eta)` against its Laurent
/// expansion to relative `1e-8`.
pub fn zeta_spot_checks() -> Result<Vec<Check>> {
    let prec = PrecisionConfig::new(50, 1e-40)?;
    let bits = prec.bits();
    let pi = prec.pi();
    let mut out = Vec::new();
    for (s, reference) in [
        (2u32, Float::with_val(bits, pi.square_ref()) / 6u32),
        (4u32, Float::with_val(bits, &pi * &pi).square() / 90u32),
    ] {
        let z = zeta_real(&prec.float(s), &prec)?;
        let diff = Float::with_val(bits, &z - &reference).abs().to_f64();
        out.push(Check::new(
            format!("zeta({s}) closed form"),
            diff <= 1e-30,
            z.to_f64(),
            reference.to_f64(),
            format!("|diff| = {diff:.3e}, tol 1e-30"),
        ));
    }
    for eta in ["1e-3", "1e-6"] {
        let e = prec.parse(eta)?;
        let z = zeta_real(&Float::with_val(bits, &e + 1u32), &prec)?;
        let laurent = Float::with_val(bits, e.recip_ref())
            + Float::with_val(bits, Constant::Euler)
            - Float::with_val(bits, &e * STIELTJES_1);
        let rel = (Float::with_val(bits, &z - &laurent) / &z).abs().to_f64();
        out.push(Check::new(
            format!("zeta(1 + {eta}) Laurent expansion"),
            rel <= 1e-8,
            z.to_f64(),
            laurent.to_f64(),
            format!("relative diff {rel:.3e}, tol 1e-8"),
        ));
    }
    Ok(out)
}

/// `C2`, `C3` do not increase from `T0 = 1` to `T0 = 10`, `C1` is unchanged,
/// and the breakdown sums back to the constants.
pub fn assembly_checks(label: &str, point: &SearchPoint, prec: &PrecisionConfig) -> Result<Vec<Check>> {
    let low = compute_constants(&SearchPoint { t0: prec.float(1), ..point.clone() }, prec)?;
    let high = compute_constants(&SearchPoint { t0: prec.float(10), ..point.clone() }, prec)?;
    let (a, b) = (low.triple, high.triple);
    let mut out = vec![
        Check::new(format!("{label}/C1 independent of T0"), a.c1 == b.c1, b.c1, a.c1, "bitwise"),
        Check::new(format!("{label}/C2(T0=10) <= C2(T0=1)"), b.c2 <= a.c2, b.c2, a.c2, ""),
        Check::new(format!("{label}/C3(T0=10) <= C3(T0=1)"), b.c3 <= a.c3, b.c3, a.c3, ""),
    ];
    for (t0, rep) in [(1, &low), (10, &high)] {
        for (which, sum, total) in [
            ("C2", rep.breakdown.c2_sum(), rep.triple.c2),
            ("C3", rep.breakdown.c3_sum(), rep.triple.c3),
        ] {
            let rel = ((sum - total) / total).abs();
            out.push(Check::new(
                format!("{label}/breakdown sums to {which} at T0={t0}"),
                rel <= 1e-15,
                sum,
                total,
                format!("relative diff {rel:.1e}"),
            ));
        }
    }
    Ok(out)
}

/// Runs the suite. `weight` perturbs the `L*` weight in the closed forms;
/// it exists so the suite can be shown to catch such a change.
pub fn run(level: Level, weight: Option<&str>, prec: &PrecisionConfig) -> Result<VerifyReport> {
    let weight = weight.map(|w| parse_height(w, prec)).transpose()?;
    let points = table_points(prec)?;
    let mut checks = zeta_spot_checks()?;
    let rows: Vec<&(u32, SearchPoint)> = match level {
        Level::Fast => points.iter().filter(|(row, _)| *row == 2).collect(),
        Level::Full => points.iter().collect(),
    };
    let per_row: Vec<Vec<Check>> = rows
        .par_iter()
        .map(|(row, point)| {
            let label = format!("row{row}");
            let mut out = closed_form_checks(&label, point, weight.as_ref(), prec)?;
            if level == Level::Full {
                out.extend(zeta_int_checks(&label, point, prec)?);
                out.extend(riemann_sum_checks(&label, point, prec)?);
                out.push(kernel_majorant_check(&label, point, prec)?);
                out.extend(assembly_checks(&label, point, prec)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    checks.extend(per_row.into_iter().flatten());
    if level == Level::Full {
        checks.extend(gamma_checks(prec)?);
    }
    Ok(VerifyReport { level, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let rep = run(Level::Fast, None, &PrecisionConfig::default()).unwrap();
        assert_eq!(rep.checks.len(), 4 + 6);
        assert!(rep.passed(), "{:#?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn canary_weight_is_caught() {
        let rep = run(Level::Fast, Some("7/18"), &PrecisionConfig::default()).unwrap();
        let failed: Vec<&str> = rep.failures().map(|c| c.name.as_str()).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().all(|n| n.contains("kappa4") || n.contains("kappa5") || n.contains("lstar")));
        assert!(failed.iter().any(|n| n.contains("lstar")));
    }

    #[test]
    fn heights_parse_as_fractions() {
        let prec = PrecisionConfig::default();
        let t = parse_height("5/7", &prec).unwrap();
        assert_eq!(t, ratio(5, 7, prec.bits()));
        assert_eq!(parse_height("10", &prec).unwrap(), 10);
    }
}
