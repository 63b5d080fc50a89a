//! Angular geometry of the Jensen disc `D(c, r)` and the log kernels
//! integrated over it.

use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::ratio;

/// Disc centre and radius. All derived quantities use the precision of `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleParams {
    pub c: Float,
    pub r: Float,
}

impl CircleParams {
    pub fn new(c: Float, r: Float) -> Result<Self> {
        if r <= 0 || r.is_nan() {
            return Err(Error::Domain("disc radius must be positive".into()));
        }
        Ok(CircleParams { c, r })
    }

    pub(crate) fn bits(&self) -> u32 {
        self.c.prec().max(self.r.prec())
    }

    /// `c - r > -1/2`, so that `theta_{-1/2} = pi`.
    pub fn clears_minus_half(&self) -> bool {
        let left = Float::with_val(self.bits(), &self.c - &self.r);
        left > -0.5
    }
}

/// The four angles that split `[0, pi]` for a given `(c, r, eta)`.
///
/// Since `theta_y` is non-increasing in `y` and `1 + eta > -eta > 1 - c > -1/2`,
/// the angles are ordered
/// `theta_1_plus_eta <= theta_minus_eta <= theta_1_minus_c <= theta_minus_half`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGrid {
    pub theta_1_plus_eta: Float,
    pub theta_minus_eta: Float,
    pub theta_1_minus_c: Float,
    pub theta_minus_half: Float,
}

impl ThetaGrid {
    pub fn new(circ: &CircleParams, eta: &Float) -> Self {
        let bits = circ.bits();
        let one_plus_eta = Float::with_val(bits, eta + 1u32);
        let minus_eta = Float::with_val(bits, -eta);
        let one_minus_c = Float::with_val(bits, 1u32 - &circ.c);
        ThetaGrid {
            theta_1_plus_eta: theta_y(&one_plus_eta, circ),
            theta_minus_eta: theta_y(&minus_eta, circ),
            theta_1_minus_c: theta_y(&one_minus_c, circ),
            theta_minus_half: theta_y(&ratio(-1, 2, bits), circ),
        }
    }
}

/// `theta_y`: 0 right of the disc, `arccos((y-c)/r)` across it, `pi` left of it.
pub fn theta_y(y: &Float, circ: &CircleParams) -> Float {
    let bits = circ.bits();
    let shifted = Float::with_val(bits, y - &circ.c);
    let mut cosine = shifted / &circ.r;
    // Clamp to absorb rounding at the branch edges.
    if cosine >= 1 {
        return Float::with_val(bits, 0);
    }
    if cosine <= -1 {
        cosine = Float::with_val(bits, -1);
    }
    cosine.acos()
}

/// `sigma = c + r cos(theta)`.
pub fn sigma_of_theta(theta: &Float, circ: &CircleParams) -> Float {
    let bits = circ.bits();
    let cos = Float::with_val(bits, theta.cos_ref());
    cos * &circ.r + &circ.c
}

fn check_shift(j: i32) -> Result<()> {
    if !(-1..=1).contains(&j) {
        return Err(Error::Domain(format!(
            "kernel shift j must be -1, 0 or 1, got {j}"
        )));
    }
    Ok(())
}

/// The `log x <= x - 1` majorant of the log kernel (times `T + 2`):
/// `2 r sin(theta) - 4 + (7/19) ((j + c + r cos)^2 + (r sin - 2)^2)`.
pub fn l_star(j: i32, theta: &Float, circ: &CircleParams) -> Result<Float> {
    check_shift(j)?;
    Ok(l_star_weighted(j, theta, circ, &ratio(7, 19, circ.bits())))
}

pub(crate) fn l_star_weighted(j: i32, theta: &Float, circ: &CircleParams, weight: &Float) -> Float {
    let bits = circ.bits();
    let (sin, cos) = theta.sin_cos_ref().complete(bits);
    let r_sin = Float::with_val(bits, &circ.r * &sin);
    let horizontal = Float::with_val(bits, &circ.r * &cos) + &circ.c + j;
    let vertical = Float::with_val(bits, &r_sin - 2u32);
    let squares = horizontal.square() + vertical.square();
    r_sin * 2u32 - 4u32 + squares * weight
}

/// `L_j(theta) = log(((j + c + r cos)^2 + (|r sin| + T)^2) / (T + 2)^2)`.
pub fn l_kernel(j: i32, theta: &Float, circ: &CircleParams, t: &Float) -> Result<Float> {
    check_shift(j)?;
    if *t <= 0 {
        return Err(Error::Domain("height T must be positive".into()));
    }
    let bits = circ.bits();
    let (sin, cos) = theta.sin_cos_ref().complete(bits);
    let horizontal = Float::with_val(bits, &circ.r * &cos) + &circ.c + j;
    let vertical = Float::with_val(bits, &circ.r * &sin).abs() + t;
    let numerator = horizontal.square() + vertical.square();
    if numerator <= 0 {
        return Err(Error::Domain("log kernel argument is not positive".into()));
    }
    let scale = Float::with_val(bits, t + 2u32).square();
    Ok((numerator / scale).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionConfig;
    use proptest::prelude::*;

    fn circle(prec: &PrecisionConfig, c: &str, r: &str) -> CircleParams {
        CircleParams::new(prec.parse(c).unwrap(), prec.parse(r).unwrap()).unwrap()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn theta_branches() {
        let prec = PrecisionConfig::default();
        let circ = circle(&prec, "1.3", "0.7");
        let pi = std::f64::consts::PI;
        assert_eq!(theta_y(&prec.float(3.0), &circ), 0);
        assert!(close(&theta_y(&prec.float(-0.4), &circ), pi, 1e-15));
        assert!(close(&theta_y(&prec.parse("1.3").unwrap(), &circ), pi / 2.0, 1e-15));
        assert_eq!(theta_y(&prec.parse("2.0").unwrap(), &circ), 0);
        assert!(close(&theta_y(&prec.parse("0.6").unwrap(), &circ), pi, 1e-15));
    }

    #[test]
    fn sigma_special_angles() {
        let prec = PrecisionConfig::default();
        let circ = circle(&prec, "2", "1");
        assert!(close(&sigma_of_theta(&prec.float(0), &circ), 3.0, 1e-15));
        assert!(close(&sigma_of_theta(&prec.pi(), &circ), 1.0, 1e-15));
        let half_pi = prec.pi() / 2u32;
        assert!(close(&sigma_of_theta(&half_pi, &circ), 2.0, 1e-15));
    }

    #[test]
    fn l_star_hand_values() {
        let prec = PrecisionConfig::default();
        let circ = circle(&prec, "2", "1");
        let v = l_star(-1, &prec.float(0), &circ).unwrap();
        assert!(close(&v, -4.0 + 56.0 / 19.0, 1e-15));
        // theta = pi: sin = 0 leaves -4 + (7/19)((j + c - r)^2 + 4)
        for j in [-1, 0, 1] {
            let v = l_star(j, &prec.pi(), &circ).unwrap();
            let jc = f64::from(j) + 1.0;
            assert!(close(&v, -4.0 + 7.0 / 19.0 * (jc * jc + 4.0), 1e-15));
        }
        let unit = circle(&prec, "1", "1");
        let v = l_star(1, &(prec.pi() / 2u32), &unit).unwrap();
        assert!(close(&v, -2.0 + 35.0 / 19.0, 1e-15));
        assert!(l_star(2, &prec.float(0), &unit).is_err());
    }

    #[test]
    fn l_kernel_hand_value() {
        let prec = PrecisionConfig::default();
        let circ = circle(&prec, "1", "1");
        let v = l_kernel(-1, &prec.float(0), &circ, &prec.float(2)).unwrap();
        assert!(close(&v, (5.0f64 / 16.0).ln(), 1e-15));
        assert!(l_kernel(1, &prec.float(0), &circ, &prec.float(0)).is_err());
        assert!(l_kernel(-2, &prec.float(0), &circ, &prec.float(1)).is_err());
    }

    #[test]
    fn grid_order_for_chain_point() {
        let prec = PrecisionConfig::default();
        let circ = circle(&prec, "1.042877508", "1.259860485");
        let grid = ThetaGrid::new(&circ, &prec.parse("0.01737451737").unwrap());
        assert!(grid.theta_1_plus_eta >= 0);
        assert!(grid.theta_1_plus_eta <= grid.theta_minus_eta);
        assert!(grid.theta_minus_eta <= grid.theta_1_minus_c);
        assert!(grid.theta_1_minus_c <= grid.theta_minus_half);
        assert_eq!(grid.theta_minus_half, prec.pi());
        assert!(circ.clears_minus_half());
    }

    proptest! {
        #[test]
        fn theta_non_increasing(y1 in -3.0f64..3.0, y2 in -3.0f64..3.0, c in 0.5f64..1.5, r in 0.1f64..2.0) {
            let prec = PrecisionConfig::with_digits(20).unwrap();
            let circ = CircleParams::new(prec.float(c), prec.float(r)).unwrap();
            let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
            prop_assert!(theta_y(&prec.float(lo), &circ) >= theta_y(&prec.float(hi), &circ));
        }

        #[test]
        fn l_kernel_even(theta in -3.2f64..3.2, j in -1i32..=1, t in 0.8f64..50.0) {
            let prec = PrecisionConfig::with_digits(20).unwrap();
            let circ = CircleParams::new(prec.float(1.07), prec.float(1.4)).unwrap();
            let a = l_kernel(j, &prec.float(theta), &circ, &prec.float(t)).unwrap();
            let b = l_kernel(j, &prec.float(-theta), &circ, &prec.float(t)).unwrap();
            prop_assert!((a.to_f64() - b.to_f64()).abs() < 1e-15);
        }
    }
}
