//! Parameter validation and assembly of the constant triples.

use std::fmt;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::gamma::ek_c2_term;
use crate::geometry::{CircleParams, ThetaGrid};
use crate::kappa::{
    disc_violations, zeta_int_first_from, zeta_int_second_from, EdgeLogs, KappaSet, THETA_LIMIT,
};
use crate::precision::{parse_decimal, ratio, to_f64, PrecisionConfig};
use crate::zeta::{log_zeta_ratio, log_zeta_real};

/// Default Riemann-sum resolutions.
pub const DEFAULT_J1: u32 = 64;
pub const DEFAULT_J2: u32 = 39;

/// A candidate `(c, r, eta)` with its sum resolutions and starting height.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchPoint {
    pub c: Float,
    pub r: Float,
    pub eta: Float,
    pub j1: u32,
    pub j2: u32,
    pub t0: Float,
}

impl SearchPoint {
    /// Builds a point from decimal strings parsed at working precision.
    pub fn parse(
        c: &str,
        r: &str,
        eta: &str,
        j1: u32,
        j2: u32,
        t0: &str,
        prec: &PrecisionConfig,
    ) -> Result<Self> {
        Ok(SearchPoint {
            c: prec.parse(c)?,
            r: prec.parse(r)?,
            eta: prec.parse(eta)?,
            j1,
            j2,
            t0: prec.parse(t0)?,
        })
    }

    fn bits(&self) -> u32 {
        self.c.prec().max(self.r.prec()).max(self.eta.prec())
    }

    pub fn circle(&self) -> Result<CircleParams> {
        CircleParams::new(self.c.clone(), self.r.clone())
    }

    /// `sigma1 = c + (c - 1/2)^2 / r`
    pub fn sigma1(&self) -> Float {
        let bits = self.bits();
        let shifted = Float::with_val(bits, &self.c - ratio(1, 2, bits));
        shifted.square() / &self.r + &self.c
    }

    /// `delta = 2c - sigma1 - 1/2`
    pub fn delta(&self) -> Float {
        let bits = self.bits();
        Float::with_val(bits, &self.c * 2u32) - self.sigma1() - ratio(1, 2, bits)
    }

    pub fn grid(&self) -> Result<ThetaGrid> {
        Ok(ThetaGrid::new(&self.circle()?, &self.eta))
    }

    /// The same point with every real rounded to `prec`.
    pub fn at_precision(&self, prec: &PrecisionConfig) -> SearchPoint {
        let bits = prec.bits();
        SearchPoint {
            c: Float::with_val(bits, &self.c),
            r: Float::with_val(bits, &self.r),
            eta: Float::with_val(bits, &self.eta),
            j1: self.j1,
            j2: self.j2,
            t0: Float::with_val(bits, &self.t0),
        }
    }
}

impl fmt::Display for SearchPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "c={} r={} eta={} J1={} J2={} T0={}",
            short(&self.c),
            short(&self.r),
            short(&self.eta),
            self.j1,
            self.j2,
            short(&self.t0)
        )
    }
}

fn short(x: &Float) -> String {
    format!("{}", to_f64(x))
}

/// Decimal-string form so that precision survives a JSON round trip.
#[derive(Serialize, Deserialize)]
struct SearchPointRepr {
    c: String,
    r: String,
    eta: String,
    j1: u32,
    j2: u32,
    t0: String,
    precision_bits: u32,
}

fn exact_decimal(x: &Float) -> String {
    x.to_string_radix(10, None)
}

impl Serialize for SearchPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SearchPointRepr {
            c: exact_decimal(&self.c),
            r: exact_decimal(&self.r),
            eta: exact_decimal(&self.eta),
            j1: self.j1,
            j2: self.j2,
            t0: exact_decimal(&self.t0),
            precision_bits: self.bits().max(self.t0.prec()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SearchPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SearchPointRepr::deserialize(d)?;
        let bits = repr.precision_bits;
        if !(rug::float::prec_min()..=rug::float::prec_max()).contains(&bits) {
            return Err(serde::de::Error::custom(format!("unsupported precision {bits}")));
        }
        let p = |s: &str| parse_decimal(s, bits).map_err(serde::de::Error::custom);
        Ok(SearchPoint {
            c: p(&repr.c)?,
            r: p(&repr.r)?,
            eta: p(&repr.eta)?,
            j1: repr.j1,
            j2: repr.j2,
            t0: p(&repr.t0)?,
        })
    }
}

/// Degree, discriminant and real places of a number field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub n_k: u32,
    /// Natural log of the absolute discriminant.
    pub log_dk: f64,
    pub r1: u32,
}

impl FieldParams {
    pub fn new(n_k: u32, log_dk: f64, r1: u32) -> Result<Self> {
        if n_k == 0 {
            return Err(Error::Domain("degree n_K must be positive".into()));
        }
        if r1 > n_k || !(n_k - r1).is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "n_K - r1 must be even and nonnegative (n_K={n_k}, r1={r1})"
            )));
        }
        if !(log_dk >= 0.0) || !log_dk.is_finite() {
            return Err(Error::Domain(format!(
                "log d_K must be finite and nonnegative, got {log_dk}"
            )));
        }
        Ok(FieldParams { n_k, log_dk, r1 })
    }

    /// Takes the discriminant itself as a decimal string, so values far past
    /// the `f64` range are accepted.
    pub fn with_discriminant(n_k: u32, d_k: &str, r1: u32, prec: &PrecisionConfig) -> Result<Self> {
        let d = prec.parse(d_k)?;
        if d < 1 {
            return Err(Error::Domain(format!("discriminant must be at least 1, got {d_k}")));
        }
        Self::new(n_k, to_f64(&d.ln()), r1)
    }

    pub fn r2(&self) -> u32 {
        (self.n_k - self.r1) / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantTriple {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DTriple {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Each named contribution to `C2` or `C3`, already divided by
/// `Lambda = pi log(r / (c - 1/2))` where it appears under that factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub gk_term: f64,
    pub log_zeta_sigma1_term: f64,
    pub ek_term: f64,
    pub zeta_int_first: f64,
    pub zeta_int_second: f64,
    pub eta_strip_term: f64,
    pub kappa45_term: f64,
    pub zeta_ratio_term: f64,
    pub base_5_2: f64,
    pub log3_term: f64,
    pub t0_log_term: f64,
    pub lstar_term: f64,
}

impl BoundBreakdown {
    pub fn c2_sum(&self) -> f64 {
        self.gk_term
            + self.log_zeta_sigma1_term
            + self.ek_term
            + self.zeta_int_first
            + self.zeta_int_second
            + self.eta_strip_term
            + self.kappa45_term
            + self.zeta_ratio_term
    }

    pub fn c3_sum(&self) -> f64 {
        self.base_5_2 + self.log3_term + self.t0_log_term + self.lstar_term
    }

    /// `(name, value)` pairs in display order.
    pub fn entries(&self) -> [(&'static str, f64); 12] {
        [
            ("gk_term", self.gk_term),
            ("log_zeta_sigma1_term", self.log_zeta_sigma1_term),
            ("ek_term", self.ek_term),
            ("zeta_int_first", self.zeta_int_first),
            ("zeta_int_second", self.zeta_int_second),
            ("eta_strip_term", self.eta_strip_term),
            ("kappa45_term", self.kappa45_term),
            ("zeta_ratio_term", self.zeta_ratio_term),
            ("base_5_2", self.base_5_2),
            ("log3_term", self.log3_term),
            ("t0_log_term", self.t0_log_term),
            ("lstar_term", self.lstar_term),
        ]
    }
}

/// Raw intermediate values, reported alongside the constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
    /// Sign of `kappa4 + kappa5`; when negative the `max{0, .}` in `C2` is 0.
    pub kappa45_sum: f64,
    /// Sum of the three `L*` integrals; when negative the `C3` max is 0.
    pub lstar_sum: f64,
    pub lambda: f64,
    pub sigma1: f64,
    pub delta: f64,
    pub theta_1_plus_eta: f64,
    pub theta_minus_eta: f64,
    pub theta_1_minus_c: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub triple: ConstantTriple,
    pub breakdown: BoundBreakdown,
    pub diagnostics: Diagnostics,
}

/// Every violated inequality of the admissible parameter chain.
pub fn validate(point: &SearchPoint) -> Vec<Violation> {
    let mut out = Vec::new();
    if point.j1 == 0 {
        out.push(Violation::J1Zero);
    }
    if point.j2 == 0 {
        out.push(Violation::J2Zero);
    }
    let bits = point.bits();
    if point.t0 < ratio(5, 7, bits.max(point.t0.prec())) || point.t0.is_nan() {
        out.push(Violation::T0TooSmall);
    }
    let circ = match point.circle() {
        Ok(circ) => circ,
        Err(_) => {
            out.push(Violation::RadiusNotPositive);
            if point.eta <= 0 {
                out.push(Violation::EtaNotPositive);
            }
            return out;
        }
    };
    out.extend(disc_violations(&circ, &point.eta));
    let delta = point.delta();
    if delta < ratio(1, 4, bits) {
        out.push(Violation::DeltaBelowQuarter);
    }
    if delta >= ratio(1, 2, bits) {
        out.push(Violation::DeltaNotBelowHalf);
    }
    if point.sigma1() >= Float::with_val(bits, &point.c + &point.r) {
        out.push(Violation::Sigma1NotInsideDisc);
    }
    if ThetaGrid::new(&circ, &point.eta).theta_1_plus_eta > THETA_LIMIT {
        out.push(Violation::ThetaTooLarge);
    }
    out
}

fn ensure_valid(point: &SearchPoint) -> Result<()> {
    let v = validate(point);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Constraint(v))
    }
}

/// Assembles `(C1, C2, C3)` and the per-term breakdown.
pub fn compute_constants(point: &SearchPoint, prec: &PrecisionConfig) -> Result<ConstantsReport> {
    let point = point.at_precision(prec);
    ensure_valid(&point)?;
    let kappas = KappaSet::compute(
        &point.circle()?,
        &point.eta,
        point.j1,
        point.j2,
        &point.grid()?,
        prec,
    )?;
    assemble(&point, &kappas, prec)
}

/// Assembly from precomputed kappas; `point` is already validated and at
/// working precision.
pub(crate) fn assemble(
    point: &SearchPoint,
    kappas: &KappaSet,
    prec: &PrecisionConfig,
) -> Result<ConstantsReport> {
    let bits = prec.bits();
    let circ = point.circle()?;
    let grid = point.grid()?;
    let pi = prec.pi();
    let t0 = &point.t0;
    let sigma1 = point.sigma1();
    let delta = point.delta();

    let half = ratio(1, 2, bits);
    let lambda = Float::with_val(bits, &point.r / Float::with_val(bits, &point.c - &half)).ln() * &pi;

    let logs = EdgeLogs::compute(&circ, &point.eta, prec)?;
    let zi1 = zeta_int_first_from(&logs, &kappas.kappa2, point.j1, &grid, prec);
    let zi2 = zeta_int_second_from(&logs, &kappas.kappa3, point.j2, &grid, prec);
    let strip = Float::with_val(bits, &grid.theta_minus_eta - &grid.theta_1_plus_eta);
    let eta_strip = Float::with_val(bits, &logs.at_one_plus_eta * &strip);
    let t0_plus_2 = Float::with_val(bits, t0 + 2u32);
    let kappa45_sum = Float::with_val(bits, &kappas.kappa4 + &kappas.kappa5);
    let kappa45 = positive_part(Float::with_val(bits, &kappa45_sum / &t0_plus_2));
    let zeta_ratio = log_zeta_ratio(&point.c, prec)? * &pi;

    let over_lambda = |x: &Float| Float::with_val(bits, x / &lambda);
    let gk = Float::with_val(bits, t0 * 25u32).recip();
    let lz_sigma1 = log_zeta_real(&sigma1, prec)? * 2u32 / &pi;
    let ek = ek_c2_term(&delta, t0)?;

    let c2_terms = [
        gk.clone(),
        lz_sigma1.clone(),
        ek.clone(),
        over_lambda(&zi1),
        over_lambda(&zi2),
        over_lambda(&eta_strip),
        over_lambda(&kappa45),
        over_lambda(&zeta_ratio),
    ];
    let mut c2 = Float::with_val(bits, 0);
    for term in &c2_terms {
        c2 += term;
    }

    let base = ratio(5, 2, bits);
    let t0_log = {
        let growth = Float::with_val(bits, Float::with_val(bits, 2u32) / t0).ln_1p();
        over_lambda(&(growth * &pi))
    };
    let log3 = over_lambda(&(Float::with_val(bits, 3u32).ln() * &strip));
    let lstar_sum = Float::with_val(bits, &kappas.lstar_int_first + &kappas.lstar_int_mid)
        + &kappas.lstar_int_last;
    let lstar = positive_part(over_lambda(&lstar_sum) / (t0_plus_2.clone() * 2u32));
    let c3 = Float::with_val(bits, &base + &t0_log) + &log3 + &lstar;
    let c1 = over_lambda(&kappas.kappa1);

    let mut warnings = Vec::new();
    if *t0 < 1 {
        warnings.push(format!(
            "T0 = {} is below 1; the zero-counting theorem is only stated for T >= 1",
            to_f64(t0)
        ));
    }
    let triple = ConstantTriple {
        c1: to_f64(&c1),
        c2: to_f64(&c2),
        c3: to_f64(&c3),
    };
    if !(triple.c1 > 0.0 && triple.c2 > 0.0 && triple.c3 > 0.0) {
        return Err(Error::Domain(format!("non-positive constants {triple:?}")));
    }
    Ok(ConstantsReport {
        triple,
        breakdown: BoundBreakdown {
            gk_term: to_f64(&c2_terms[0]),
            log_zeta_sigma1_term: to_f64(&c2_terms[1]),
            ek_term: to_f64(&c2_terms[2]),
            zeta_int_first: to_f64(&c2_terms[3]),
            zeta_int_second: to_f64(&c2_terms[4]),
            eta_strip_term: to_f64(&c2_terms[5]),
            kappa45_term: to_f64(&c2_terms[6]),
            zeta_ratio_term: to_f64(&c2_terms[7]),
            base_5_2: to_f64(&base),
            log3_term: to_f64(&log3),
            t0_log_term: to_f64(&t0_log),
            lstar_term: to_f64(&lstar),
        },
        diagnostics: Diagnostics {
            kappa1: to_f64(&kappas.kappa1),
            kappa2: to_f64(&kappas.kappa2),
            kappa3: to_f64(&kappas.kappa3),
            kappa4: to_f64(&kappas.kappa4),
            kappa5: to_f64(&kappas.kappa5),
            kappa45_sum: to_f64(&kappa45_sum),
            lstar_sum: to_f64(&lstar_sum),
            lambda: to_f64(&lambda),
            sigma1: to_f64(&sigma1),
            delta: to_f64(&delta),
            theta_1_plus_eta: to_f64(&grid.theta_1_plus_eta),
            theta_minus_eta: to_f64(&grid.theta_minus_eta),
            theta_1_minus_c: to_f64(&grid.theta_1_minus_c),
            warnings,
        },
    })
}

fn positive_part(x: Float) -> Float {
    if x.is_sign_negative() {
        Float::with_val(x.prec(), 0)
    } else {
        x
    }
}

/// `x` rounded up to a multiple of `10^-3`, computed on the exact value.
fn ceil3(x: &Float) -> f64 {
    let exact = x.to_rational().expect("finite value") * 1000u32;
    let units = exact.ceil();
    to_f64(&Float::with_val(64, Rational::from((units.numer().clone(), 1000u32))))
}

/// The triple for the `log d_K + n_K log T` form of the bound, valid for
/// `T >= t0 >= 1`.
pub fn derive_d(triple: &ConstantTriple, t0: f64) -> Result<DTriple> {
    if !(t0 >= 1.0) || !t0.is_finite() {
        return Err(Error::Domain(format!("derive_d needs t0 >= 1, got {t0}")));
    }
    let prec = PrecisionConfig::default();
    let bits = prec.bits();
    let c1 = prec.float(triple.c1);
    let growth = Float::with_val(bits, 2.0 / Float::with_val(bits, t0)).ln_1p();
    let two_pi_log = Float::with_val(bits, &prec.pi() * 2u32).ln();
    let shift = Float::with_val(bits, &growth - &two_pi_log) * &c1;
    let d2 = shift + triple.c2 + ratio(1, 4, bits);
    Ok(DTriple {
        d1: ceil3(&c1),
        d2: ceil3(&d2),
        d3: ceil3(&prec.float(triple.c3)),
    })
}

/// `C1 (log d_K + n_K (log(T + 2) - log 2 pi)) + C2 n_K + C3`.
pub fn theorem_bound(field: &FieldParams, t: f64, triple: &ConstantTriple) -> Result<f64> {
    if !(t >= 5.0 / 7.0) || !t.is_finite() {
        return Err(Error::Domain(format!("height T must be at least 5/7, got {t}")));
    }
    let n = f64::from(field.n_k);
    let scaled = field.log_dk + n * ((t + 2.0).ln() - (2.0 * std::f64::consts::PI).ln());
    Ok(triple.c1 * scaled + triple.c2 * n + triple.c3)
}

/// Main term and the window it implies for `N_K(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NkWindow {
    pub main: f64,
    pub bound: f64,
    /// `max(0, main - bound)`
    pub low: f64,
    pub high: f64,
}

impl NkWindow {
    /// Smallest zero count the window allows.
    pub fn low_count(&self) -> u64 {
        self.low.ceil() as u64
    }

    /// Largest zero count the window allows, or `None` if it is empty.
    pub fn high_count(&self) -> Option<u64> {
        if self.high < 0.0 {
            None
        } else {
            Some(self.high.floor() as u64)
        }
    }
}

pub fn nk_window(field: &FieldParams, t: f64, triple: &ConstantTriple) -> Result<NkWindow> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::Domain(format!("height T must be at least 1, got {t}")));
    }
    let bound = theorem_bound(field, t, triple)?;
    let n = f64::from(field.n_k);
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    let main = t / std::f64::consts::PI * (field.log_dk + n * (t / two_pi_e).ln())
        - f64::from(field.r1) / 4.0;
    Ok(NkWindow {
        main,
        bound,
        low: (main - bound).max(0.0),
        high: main + bound,
    })
}
