//! Globally adaptive Gauss–Kronrod (7/15) quadrature in `f64`.
//!
//! Used as the independent oracle for the closed-form integrals and for the
//! numerical checks of the zeta-integral bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Maximum number of live subintervals.
pub const SUBDIVISION_BUDGET: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::Domain(format!("integrand not finite at {center}")));
    }
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::Domain(format!(
                "integrand not finite near {}",
                center - dx
            )));
        }
        kronrod += w * (f1 + f2);
        // Odd Kronrod nodes are the 7-point Gauss nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to an estimated absolute error `<= tol`.
///
/// Reversed limits are allowed and flip the sign. Fails with a precision
/// error if the subdivision budget is exhausted or intervals collapse below
/// machine resolution before the estimate converges.
pub fn quad_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = quad_adaptive(f, b, a, tol)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }

    let first = gk15(&mut f, a, b)?;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while total_error > tol {
        if heap.len() >= SUBDIVISION_BUDGET {
            return Err(Error::Precision(format!(
                "quadrature did not converge within {SUBDIVISION_BUDGET} intervals (error {total_error:e})"
            )));
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Precision(format!(
                "interval collapsed at {} with error {total_error:e}",
                worst.a
            )));
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally to keep the running error from drifting.
        if heap.len().is_power_of_two() {
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
    let total: f64 = heap.iter().map(|s| s.value).sum();
    Ok(QuadResult {
        value: total,
        error_estimate: total_error,
        intervals: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn elementary_integrals() {
        let r = quad_adaptive(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
        let r = quad_adaptive(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        let r = quad_adaptive(|x| x * x, 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(quad_adaptive(f64::exp, 2.0, 2.0, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn log_endpoint_singularity() {
        // int_0^1 -ln(x) dx = 1
        let r = quad_adaptive(|x| -(x.max(f64::MIN_POSITIVE)).ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11, "{}", r.value);
        // Sharply peaked but integrable: -ln(eta + x) on [0, 1].
        let eta = 4.2826451e-6f64;
        let exact = -((1.0 + eta) * (1.0 + eta).ln() - (1.0 + eta) - (eta * eta.ln() - eta));
        let r = quad_adaptive(|x| -(eta + x).ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - exact).abs() < 1e-11);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(quad_adaptive(|x| 1.0 / x, 0.0, 1.0, 1e-12).is_err());
        assert!(quad_adaptive(|x| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn unresolvable_tolerance_reports_precision_error() {
        // Low-bit noise stays rough at every scale, so refinement never settles.
        let r = quad_adaptive(|x| (x.to_bits() & 1) as f64, 0.0, 1.0, 1e-6);
        assert!(matches!(r, Err(Error::Precision(_))), "{r:?}");
    }
}
