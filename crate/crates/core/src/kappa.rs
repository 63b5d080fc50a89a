//! The kappa constants, the `L*` integrals and the zeta-integral bounds.
//!
//! With `sigma = c + r cos(theta)` the majorant kernel is affine in
//! `(1, cos, sin)`:
//!
//! ```text
//! L*_j = A_j + B_j cos + C sin,
//! A_j = -4 + w((j + c)^2 + 4 + r^2),  B_j = 2 w r (j + c),  C = 2 r (1 - 2w),
//! ```
//!
//! with `w = 7/19`, so every integral of `(p + q cos) L*_j` is elementary.

use rayon::prelude::*;
use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result, Violation};
use crate::geometry::{CircleParams, ThetaGrid};
use crate::precision::{ratio, PrecisionConfig};
use crate::zeta::log_zeta_real;

macro_rules! fv {
    ($bits:expr, $e:expr) => {
        Float::with_val($bits, $e)
    };
}

/// Largest `theta_{1+eta}` for which the zeta-integral bounds hold.
pub const THETA_LIMIT: f64 = 2.1;

#[derive(Debug, Clone, PartialEq)]
pub struct KappaSet {
    pub kappa1: Float,
    pub kappa2: Float,
    pub kappa3: Float,
    pub kappa4: Float,
    pub kappa5: Float,
    /// `int_0^{theta_{1+eta}} L*_{-1}`
    pub lstar_int_first: Float,
    /// `int_{theta_{1+eta}}^{theta_{-eta}} L*_1`
    pub lstar_int_mid: Float,
    /// `int_{theta_{-eta}}^{pi} L*_{-1}`
    pub lstar_int_last: Float,
}

/// Inequalities of the parameter chain that involve only `(c, r, eta)` and
/// the disc geometry.
pub fn disc_violations(circ: &CircleParams, eta: &Float) -> Vec<Violation> {
    let bits = circ.bits();
    let mut out = Vec::new();
    if circ.r <= 0 {
        out.push(Violation::RadiusNotPositive);
    }
    if !circ.clears_minus_half() {
        out.push(Violation::DiscTooFarLeft);
    }
    let left = Float::with_val(bits, &circ.c - &circ.r);
    let one_minus_c = Float::with_val(bits, 1u32 - &circ.c);
    if left >= one_minus_c {
        out.push(Violation::DiscNotLeftOfOneMinusC);
    }
    if *eta <= 0 {
        out.push(Violation::EtaNotPositive);
    }
    if *eta > 0.5 {
        out.push(Violation::EtaAboveHalf);
    }
    let one_plus_eta = Float::with_val(bits, eta + 1u32);
    if circ.c <= one_plus_eta {
        out.push(Violation::CenterNotAboveOnePlusEta);
    }
    out
}

fn require(violations: Vec<Violation>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Constraint(violations))
    }
}

struct LStarCoefficients {
    constant: Float,
    cosine: Float,
    sine: Float,
}

fn lstar_coefficients(j: i32, circ: &CircleParams, weight: &Float) -> LStarCoefficients {
    let bits = circ.bits();
    let shift = Float::with_val(bits, &circ.c + j);
    let r_sq = Float::with_val(bits, circ.r.square_ref());
    let constant = (Float::with_val(bits, shift.square_ref()) + 4u32 + r_sq) * weight - 4u32;
    let cosine = Float::with_val(bits, &circ.r * weight) * &shift * 2u32;
    let sine = (Float::with_val(bits, 1u32) - Float::with_val(bits, weight * 2u32)) * &circ.r * 2u32;
    LStarCoefficients {
        constant,
        cosine,
        sine,
    }
}

/// Antiderivative of `(p + q cos) (A + B cos + C sin)`:
/// `pA t + (pB + qA) sin - pC cos + qB (t/2 + sin cos/2) + qC sin^2/2`.
fn weighted_antiderivative(p: &Float, q: &Float, k: &LStarCoefficients, theta: &Float) -> Float {
    let bits = p.prec().max(theta.prec());
    let (sin, cos) = theta.sin_cos_ref().complete(bits);
    let linear = fv!(bits, p * &k.constant) * theta;
    let sin_part = (fv!(bits, p * &k.cosine) + fv!(bits, q * &k.constant)) * &sin;
    let cos_part = fv!(bits, p * &k.sine) * &cos;
    let half_angle = (fv!(bits, &sin * &cos) + theta) / 2u32;
    let cos_sq_part = fv!(bits, q * &k.cosine) * half_angle;
    let sin_sq_part = fv!(bits, q * &k.sine) * fv!(bits, sin.square_ref()) / 2u32;
    linear + sin_part - cos_part + cos_sq_part + sin_sq_part
}

fn weighted_lstar_integral(
    p: &Float,
    q: &Float,
    j: i32,
    from: &Float,
    to: &Float,
    circ: &CircleParams,
    weight: &Float,
) -> Float {
    if from == to {
        return Float::with_val(circ.bits(), 0);
    }
    let k = lstar_coefficients(j, circ, weight);
    weighted_antiderivative(p, q, &k, to) - weighted_antiderivative(p, q, &k, from)
}

fn lstar_weight(bits: u32) -> Float {
    ratio(7, 19, bits)
}

/// `int_a^b L*_j(theta) d theta` for `0 <= a <= b <= pi`.
pub fn lstar_integral(j: i32, a: &Float, b: &Float, circ: &CircleParams) -> Result<Float> {
    if !(-1..=1).contains(&j) {
        return Err(Error::Domain(format!("kernel shift j must be -1, 0 or 1, got {j}")));
    }
    let pi = Float::with_val(circ.bits(), rug::float::Constant::Pi);
    if *a < 0 || a > b || *b > pi {
        return Err(Error::Domain(format!(
            "integration range must satisfy 0 <= a <= b <= pi, got [{}, {}]",
            a.to_f64(),
            b.to_f64()
        )));
    }
    let bits = circ.bits();
    Ok(weighted_lstar_integral(
        &Float::with_val(bits, 1),
        &Float::with_val(bits, 0),
        j,
        a,
        b,
        circ,
        &lstar_weight(bits),
    ))
}

/// `kappa1 = int_{theta_{1+eta}}^{theta_{-eta}} (1 + eta - sigma)/2 + int_{theta_{-eta}}^{pi} (1 - 2 sigma)/2`.
pub fn kappa1(circ: &CircleParams, eta: &Float, grid: &ThetaGrid) -> Result<Float> {
    require(disc_violations(circ, eta))?;
    Ok(kappa1_unchecked(circ, eta, grid))
}

fn kappa1_unchecked(circ: &CircleParams, eta: &Float, grid: &ThetaGrid) -> Float {
    let bits = circ.bits();
    let (t1, tm) = (&grid.theta_1_plus_eta, &grid.theta_minus_eta);
    let pi = fv!(bits, rug::float::Constant::Pi);
    let strip_width = fv!(bits, tm - t1);
    let sin_m = fv!(bits, tm.sin_ref());
    let sin_1 = fv!(bits, t1.sin_ref());
    let p_strip = fv!(bits, eta + 1u32) - &circ.c;
    let strip = fv!(bits, &p_strip * &strip_width) - fv!(bits, &circ.r * fv!(bits, &sin_m - &sin_1));
    let p_left = fv!(bits, 1u32 - fv!(bits, &circ.c * 2u32));
    let left = fv!(bits, &p_left * fv!(bits, &pi - tm)) + fv!(bits, &circ.r * &sin_m) * 2u32;
    (strip + left) / 2u32
}

fn kappa45_unchecked(
    circ: &CircleParams,
    eta: &Float,
    grid: &ThetaGrid,
    weight: &Float,
) -> (Float, Float) {
    let bits = circ.bits();
    let (t1, tm) = (&grid.theta_1_plus_eta, &grid.theta_minus_eta);
    let p_strip = fv!(bits, eta + 1u32) - &circ.c;
    let q_strip = fv!(bits, -&circ.r);
    let k4 = weighted_lstar_integral(&p_strip, &q_strip, 1, t1, tm, circ, weight) / 4u32;
    let p_left = fv!(bits, 1u32 - fv!(bits, &circ.c * 2u32));
    let q_left = fv!(bits, &circ.r * -2i32);
    let k5 = weighted_lstar_integral(&p_left, &q_left, 1, tm, &grid.theta_minus_half, circ, weight)
        / 4u32;
    (k4, k5)
}

/// `kappa4 = (1/4) int_{theta_{1+eta}}^{theta_{-eta}} (1 + eta - sigma) L*_1`.
pub fn kappa4(circ: &CircleParams, eta: &Float, grid: &ThetaGrid) -> Result<Float> {
    require(disc_violations(circ, eta))?;
    Ok(kappa45_unchecked(circ, eta, grid, &lstar_weight(circ.bits())).0)
}

/// `kappa5 = (1/4) int_{theta_{-eta}}^{theta_{-1/2}} (1 - 2 sigma) L*_1`.
pub fn kappa5(circ: &CircleParams, eta: &Float, grid: &ThetaGrid) -> Result<Float> {
    require(disc_violations(circ, eta))?;
    Ok(kappa45_unchecked(circ, eta, grid, &lstar_weight(circ.bits())).1)
}

/// Sum of `log zeta` over `args`, evaluated in parallel and added in order.
fn sum_log_zeta(args: Vec<Float>, prec: &PrecisionConfig) -> Result<Float> {
    let logs = args
        .par_iter()
        .map(|x| log_zeta_real(x, prec))
        .collect::<Result<Vec<_>>>()?;
    let mut total = prec.float(0);
    for v in logs {
        total += v;
    }
    Ok(total)
}

fn check_count(n: u32, what: Violation) -> Result<()> {
    if n == 0 {
        Err(Error::Constraint(vec![what]))
    } else {
        Ok(())
    }
}

/// `kappa2(J1) = pi/(4 J1) (log zeta(c + r) + 2 sum_{j<J1} log zeta(c + r cos(pi j / 2 J1)))`.
pub fn kappa2(j1: u32, circ: &CircleParams, prec: &PrecisionConfig) -> Result<Float> {
    check_count(j1, Violation::J1Zero)?;
    let bits = prec.bits();
    let pi = prec.pi();
    let end = Float::with_val(bits, &circ.c + &circ.r);
    let interior: Vec<Float> = (1..j1)
        .map(|j| {
            let angle = Float::with_val(bits, &pi * j) / (2 * j1);
            angle.cos() * &circ.r + &circ.c
        })
        .collect();
    let end_log = log_zeta_real(&end, prec)?;
    let inner = sum_log_zeta(interior, prec)?;
    Ok((end_log + inner * 2u32) * pi / (4 * j1))
}

/// `kappa3(J2) = (pi - th)/(2 J2) (log zeta(1 - c + r)
///   + 2 sum_{j<J2} log zeta(1 - c - r cos(pi j/J2 + (1 - j/J2) th)))`, `th = theta_{1-c}`.
pub fn kappa3(
    j2: u32,
    circ: &CircleParams,
    grid: &ThetaGrid,
    prec: &PrecisionConfig,
) -> Result<Float> {
    check_count(j2, Violation::J2Zero)?;
    let bits = prec.bits();
    let pi = prec.pi();
    let th = &grid.theta_1_minus_c;
    let one_minus_c = Float::with_val(bits, 1u32 - &circ.c);
    let end = Float::with_val(bits, &one_minus_c + &circ.r);
    let interior: Vec<Float> = (1..j2)
        .map(|j| {
            let frac = Float::with_val(bits, j) / j2;
            let rest = Float::with_val(bits, 1u32 - &frac);
            let angle = frac * &pi + rest * th;
            Float::with_val(bits, &one_minus_c - angle.cos() * &circ.r)
        })
        .collect();
    let end_log = log_zeta_real(&end, prec)?;
    let inner = sum_log_zeta(interior, prec)?;
    let width = Float::with_val(bits, &pi - th);
    Ok((end_log + inner * 2u32) * width / (2 * j2))
}

/// The logarithms shared by both zeta-integral bounds.
#[derive(Debug, Clone)]
pub(crate) struct EdgeLogs {
    /// `log zeta(1 + eta)`
    pub at_one_plus_eta: Float,
    /// `log zeta(c)`
    pub at_c: Float,
}

impl EdgeLogs {
    pub(crate) fn compute(circ: &CircleParams, eta: &Float, prec: &PrecisionConfig) -> Result<Self> {
        let one_plus_eta = Float::with_val(prec.bits(), eta + 1u32);
        Ok(EdgeLogs {
            at_one_plus_eta: log_zeta_real(&one_plus_eta, prec)?,
            at_c: log_zeta_real(&circ.c, prec)?,
        })
    }

    fn midpoint(&self) -> Float {
        Float::with_val(self.at_c.prec(), &self.at_one_plus_eta + &self.at_c) / 2u32
    }
}

fn check_theta(grid: &ThetaGrid) -> Result<()> {
    if grid.theta_1_plus_eta > THETA_LIMIT {
        Err(Error::Constraint(vec![Violation::ThetaTooLarge]))
    } else {
        Ok(())
    }
}

pub(crate) fn zeta_int_first_from(
    logs: &EdgeLogs,
    kappa2: &Float,
    j1: u32,
    grid: &ThetaGrid,
    prec: &PrecisionConfig,
) -> Float {
    let bits = prec.bits();
    let pi = prec.pi();
    let offset = Float::with_val(bits, &grid.theta_1_plus_eta - Float::with_val(bits, &pi / 2u32));
    let edge = Float::with_val(bits, &logs.at_c * &pi) / (4 * j1);
    logs.midpoint() * offset + edge + kappa2
}

pub(crate) fn zeta_int_second_from(
    logs: &EdgeLogs,
    kappa3: &Float,
    j2: u32,
    grid: &ThetaGrid,
    prec: &PrecisionConfig,
) -> Float {
    let bits = prec.bits();
    let pi = prec.pi();
    let width = Float::with_val(bits, &grid.theta_1_minus_c - &grid.theta_minus_eta);
    let tail = Float::with_val(bits, &pi - &grid.theta_1_minus_c);
    let edge = Float::with_val(bits, &logs.at_c * tail) / (2 * j2);
    logs.midpoint() * width + edge + kappa3
}

/// Upper bound for `int_0^{theta_{1+eta}} log zeta(sigma) d theta`.
pub fn zeta_int_bound_first(
    circ: &CircleParams,
    eta: &Float,
    j1: u32,
    grid: &ThetaGrid,
    prec: &PrecisionConfig,
) -> Result<Float> {
    require(disc_violations(circ, eta))?;
    check_theta(grid)?;
    let logs = EdgeLogs::compute(circ, eta, prec)?;
    let k2 = kappa2(j1, circ, prec)?;
    Ok(zeta_int_first_from(&logs, &k2, j1, grid, prec))
}

/// Upper bound for `int_{theta_{-eta}}^{pi} log zeta(1 - sigma) d theta`.
pub fn zeta_int_bound_second(
    circ: &CircleParams,
    eta: &Float,
    j2: u32,
    grid: &ThetaGrid,
    prec: &PrecisionConfig,
) -> Result<Float> {
    require(disc_violations(circ, eta))?;
    check_theta(grid)?;
    let logs = EdgeLogs::compute(circ, eta, prec)?;
    let k3 = kappa3(j2, circ, grid, prec)?;
    Ok(zeta_int_second_from(&logs, &k3, j2, grid, prec))
}

impl KappaSet {
    pub fn compute(
        circ: &CircleParams,
        eta: &Float,
        j1: u32,
        j2: u32,
        grid: &ThetaGrid,
        prec: &PrecisionConfig,
    ) -> Result<Self> {
        Self::compute_with_weight(circ, eta, j1, j2, grid, prec, &lstar_weight(circ.bits()))
    }

    /// Same as [`KappaSet::compute`] with the `L*` quadratic weight replaced;
    /// used by the verification suite to check that its oracles notice.
    #[doc(hidden)]
    pub fn compute_with_weight(
        circ: &CircleParams,
        eta: &Float,
        j1: u32,
        j2: u32,
        grid: &ThetaGrid,
        prec: &PrecisionConfig,
        weight: &Float,
    ) -> Result<Self> {
        require(disc_violations(circ, eta))?;
        let bits = circ.bits();
        let zero = Float::with_val(bits, 0);
        let one = Float::with_val(bits, 1);
        let (t1, tm) = (&grid.theta_1_plus_eta, &grid.theta_minus_eta);
        let (kappa4, kappa5) = kappa45_unchecked(circ, eta, grid, weight);
        let lstar = |j, a: &Float, b: &Float| weighted_lstar_integral(&one, &zero, j, a, b, circ, weight);
        let (kappa2, kappa3) = rayon::join(
            || kappa2(j1, circ, prec),
            || kappa3(j2, circ, grid, prec),
        );
        Ok(KappaSet {
            kappa1: kappa1_unchecked(circ, eta, grid),
            kappa2: kappa2?,
            kappa3: kappa3?,
            kappa4,
            kappa5,
            lstar_int_first: lstar(-1, &zero, t1),
            lstar_int_mid: lstar(1, t1, tm),
            lstar_int_last: lstar(-1, tm, &grid.theta_minus_half),
        })
    }
}
