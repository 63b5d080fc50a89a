//! Bounds on the gamma-factor contribution to the argument variation.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::ratio;

/// Real and complex places of a number field, `n_K = r1 + 2 r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureSplit {
    r1: u32,
    r2: u32,
}

impl SignatureSplit {
    pub fn new(r1: u32, r2: u32) -> Result<Self> {
        if r1 + 2 * r2 == 0 {
            return Err(Error::Domain("degree n_K must be positive".into()));
        }
        Ok(SignatureSplit { r1, r2 })
    }

    /// Split from the degree and the number of real places.
    pub fn from_degree(n_k: u32, r1: u32) -> Result<Self> {
        if r1 > n_k || !(n_k - r1).is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "n_K - r1 must be even and nonnegative (n_K = {n_k}, r1 = {r1})"
            )));
        }
        Self::new(r1, (n_k - r1) / 2)
    }

    pub fn r1(&self) -> u32 {
        self.r1
    }

    pub fn r2(&self) -> u32 {
        self.r2
    }

    pub fn degree(&self) -> u32 {
        self.r1 + 2 * self.r2
    }
}

const MIN_HEIGHT: (i64, i64) = (5, 7);

fn check_height(t: &Float) -> Result<()> {
    let min = ratio(MIN_HEIGHT.0, MIN_HEIGHT.1, t.prec());
    if t.is_nan() || *t < min {
        return Err(Error::Domain(format!(
            "T must be at least 5/7, got {}",
            t.to_f64()
        )));
    }
    Ok(())
}

/// `|g_K(T)| <= (2 n_K - r2) / (50 T)`.
pub fn g_k_bound(split: SignatureSplit, t: &Float) -> Result<Float> {
    check_height(t)?;
    let numerator = i64::from(2 * split.degree()) - i64::from(split.r2());
    let denom = Float::with_val(t.prec(), t * 50u32);
    Ok(Float::with_val(t.prec(), numerator) / denom)
}

/// Closed-form majorant `E_a(T, d)` of the gamma-factor variation,
/// `a in {0, 1}`, `0 <= d < 9/2`, `T >= 5/7`.
pub fn e_a(a: u32, t: &Float, d: &Float) -> Result<Float> {
    if a > 1 {
        return Err(Error::Domain(format!("a must be 0 or 1, got {a}")));
    }
    check_height(t)?;
    if d.is_nan() || *d < 0 || *d >= 4.5 {
        return Err(Error::Domain(format!(
            "d must lie in [0, 9/2), got {}",
            d.to_f64()
        )));
    }
    let bits = t.prec().max(d.prec());
    let f = |x: Float| Float::with_val(bits, x);
    let two_a = f(Float::with_val(bits, 2 * a));
    let two_d = f(Float::with_val(bits, d * 2u32));
    let two_t = f(Float::with_val(bits, t * 2u32));
    let four_t_sq = f(Float::with_val(bits, t.square_ref()) * 4u32);

    // Centres 2a + 17 +/- 2d and 2a + 17.
    let base = f(two_a.clone() + 17u32);
    let plus = f(base.clone() + &two_d);
    let minus = f(base.clone() - &two_d);
    let denom = |u: &Float| f(Float::with_val(bits, u.square_ref()) + &four_t_sq);
    let (dp, dm, d0) = (denom(&plus), denom(&minus), denom(&base));

    let two_thirds_t = f(Float::with_val(bits, t * 2u32) / 3u32);
    let mut total = f(two_thirds_t.clone() / &dp) + f(two_thirds_t.clone() / &dm)
        - f(two_thirds_t * 2u32 / &d0);

    let log_term = |u: &Float| f(Float::with_val(bits, u.square_ref()) / &four_t_sq).ln_1p();
    let half_t = f(Float::with_val(bits, t / 2u32));
    let quarter_t = f(Float::with_val(bits, t / 4u32));
    total += f(half_t * log_term(&base));
    total -= f(quarter_t.clone() * log_term(&plus));
    total -= f(quarter_t * log_term(&minus));

    let pi = Float::with_val(bits, Constant::Pi);
    let k = f(pi * 6u32 + 8u32) / 45u32;
    let three_halves = |x: &Float| f(Float::with_val(bits, x.sqrt_ref()) * x);
    total += f(k.clone() / three_halves(&dp));
    total += f(k.clone() / three_halves(&dm));
    total += f(k * 2u32 / three_halves(&d0));

    let atan_over = |x: Float| f(x / &two_t).atan();
    for step in 0..4u32 {
        let offset = 1 + 4 * step;
        let center = f(two_a.clone() + offset);
        total += atan_over(center.clone()) * 2u32;
        total -= atan_over(f(center.clone() + &two_d));
        total -= atan_over(f(center - &two_d));
    }

    let weight = |u: &Float| f(Float::with_val(bits, u - 2u32) / 4u32);
    total += f(weight(&plus) * atan_over(plus.clone()));
    total += f(weight(&minus) * atan_over(minus.clone()));
    total -= f(weight(&base) * 2u32 * atan_over(base.clone()));
    Ok(total)
}

/// `E_K(T, d) = (r1 + r2) E_0(T, d) + r2 E_1(T, d)`.
pub fn e_k(split: SignatureSplit, t: &Float, d: &Float) -> Result<Float> {
    let e0 = e_a(0, t, d)?;
    let e1 = e_a(1, t, d)?;
    Ok(e0 * (split.r1() + split.r2()) + e1 * split.r2())
}

fn check_delta(delta: &Float) -> Result<()> {
    let lo = ratio(1, 4, delta.prec());
    let hi = ratio(5, 8, delta.prec());
    if delta.is_nan() || *delta < lo || *delta > hi {
        return Err(Error::Domain(format!(
            "d must lie in [1/4, 5/8], got {}",
            delta.to_f64()
        )));
    }
    Ok(())
}

/// The two per-place fractions `(a, b)` of the simplified bound:
/// `a = (640d - 112) / (1536 (3T - 1))`, `b = (856d - 151) / (1536 (3T + 2))`.
fn simplified_parts(d: &Float, t: &Float) -> (Float, Float) {
    let bits = d.prec().max(t.prec());
    let a_num = Float::with_val(bits, d * 640u32) - 112u32;
    let a_den = (Float::with_val(bits, t * 3u32) - 1u32) * 1536u32;
    let b_num = Float::with_val(bits, d * 856u32) - 151u32;
    let b_den = (Float::with_val(bits, t * 3u32) + 2u32) * 1536u32;
    (a_num / a_den, b_num / b_den)
}

/// Simplified majorant of `E_K(T, d) / pi` for `d in [1/4, 5/8]`:
/// `(r1 + r2) a + r2 b + n_K / 2^10`.
pub fn ek_simplified_bound(split: SignatureSplit, t: &Float, d: &Float) -> Result<Float> {
    check_height(t)?;
    check_delta(d)?;
    let (a, b) = simplified_parts(d, t);
    let bits = a.prec();
    let per_degree = Float::with_val(bits, split.degree()) / 1024u32;
    Ok(a * (split.r1() + split.r2()) + b * split.r2() + per_degree)
}

/// Per-degree coefficient entering `C2`: `a + max{0, b - a} + 2^-10`.
pub fn ek_c2_term(delta: &Float, t0: &Float) -> Result<Float> {
    check_height(t0)?;
    check_delta(delta)?;
    let (a, b) = simplified_parts(delta, t0);
    let bits = a.prec();
    let excess = Float::with_val(bits, &b - &a).max(&Float::with_val(bits, 0));
    Ok(a + excess + Float::with_val(bits, 1u32) / 1024u32)
}
