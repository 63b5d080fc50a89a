//! Riemann zeta on the real half-line `sigma > 1`.
//!
//! Evaluation is Euler–Maclaurin summation
//!
//! ```text
//! zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
//!         + sum_{k=1}^{M} B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1) + R
//! ```
//!
//! with `|R|` bounded by the first omitted correction term, which is exact
//! for real `s` since every derivative of `x^-s` keeps a fixed sign.

use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;

/// Largest `k` for which `B_2k / (2k)!` is tabulated.
const MAX_BERNOULLI_INDEX: usize = 200;
const MAX_CUTOFF: u64 = 1 << 22;

/// `B_2k / (2k)!` for `k = 1..=MAX_BERNOULLI_INDEX` (index 0 unused).
fn bernoulli_coefficients() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = MAX_BERNOULLI_INDEX;
        // Tangent numbers (Brent-Harvey, integer-only recurrence).
        let mut tangent: Vec<Integer> = vec![Integer::new(); n + 1];
        tangent[1] = Integer::from(1);
        for k in 2..=n {
            tangent[k] = Integer::from(&tangent[k - 1] * (k as u64 - 1));
        }
        for k in 2..=n {
            for j in k..=n {
                let lower = Integer::from(&tangent[j - 1] * (j - k) as u64);
                let same = Integer::from(&tangent[j] * (j - k + 2) as u64);
                tangent[j] = lower + same;
            }
        }
        let mut out = Vec::with_capacity(n + 1);
        out.push(Rational::new());
        let mut factorial = Integer::from(1);
        for (k, t) in tangent.iter().enumerate().skip(1) {
            let two_k = 2 * k as u32;
            factorial *= Integer::from(two_k - 1) * two_k;
            let pow4 = Integer::from(1) << two_k;
            let denom = &pow4 * Integer::from(&pow4 - 1u32) * &factorial;
            let mut b = Rational::from((Integer::from(t * two_k), denom));
            if k % 2 == 0 {
                b = -b;
            }
            out.push(b);
        }
        out
    })
}

/// Exact Bernoulli number `B_2k`.
pub fn bernoulli_even(k: usize) -> Option<Rational> {
    if k == 0 {
        return Some(Rational::from(1));
    }
    let coeff = bernoulli_coefficients().get(k)?;
    let mut factorial = Integer::from(1);
    for i in 1..=(2 * k as u32) {
        factorial *= i;
    }
    Some(Rational::from(coeff * factorial))
}

/// log of the bound on correction term `k` (f64 estimate used to choose N, M).
fn log_term_estimate(sigma: f64, cutoff: f64, k: usize) -> f64 {
    // |B_2k|/(2k)! = 2 zeta(2k)/(2 pi)^2k <= 4/(2 pi)^2k
    let mut acc = 4f64.ln() - 2.0 * k as f64 * (2.0 * std::f64::consts::PI).ln();
    for i in 0..(2 * k - 1) {
        acc += (sigma + i as f64).ln();
    }
    acc - (sigma + 2.0 * k as f64 - 1.0) * cutoff.ln()
}

/// Picks `(N, M)` whose estimated remainder is below `target`.
fn choose_cutoffs(sigma: f64, target: f64) -> Option<(u64, usize)> {
    let log_target = target.ln() - 1.0;
    let mut cutoff = 4u64;
    while cutoff <= MAX_CUTOFF {
        let n = cutoff as f64;
        for m in 1..MAX_BERNOULLI_INDEX {
            let est = log_term_estimate(sigma, n, m + 1);
            if est < log_target {
                return Some((cutoff, m));
            }
            // Beyond k ~ pi N the terms grow again.
            if (m + 1) as f64 > std::f64::consts::PI * n {
                break;
            }
        }
        cutoff += cutoff / 4 + 1;
    }
    None
}

fn check_sigma(sigma: &Float) -> Result<()> {
    if sigma.is_nan() || *sigma <= 1 {
        return Err(Error::Domain(format!(
            "zeta requires sigma > 1, got {}",
            sigma.to_string_radix(10, Some(20))
        )));
    }
    Ok(())
}

/// `zeta(sigma)` for real `sigma > 1`, absolute error at most `prec.abs_tol()`.
pub fn zeta_real(sigma: &Float, prec: &PrecisionConfig) -> Result<Float> {
    check_sigma(sigma)?;
    let bits = prec.bits();
    let tol = prec.abs_tol();
    let s = Float::with_val(bits, sigma);
    let sigma_f = s.to_f64();
    if !sigma_f.is_finite() {
        return Err(Error::Domain("sigma must be finite".into()));
    }

    let (cutoff, corrections) = choose_cutoffs(sigma_f, tol / 2.0).ok_or_else(|| {
        Error::Precision(format!(
            "no Euler-Maclaurin cutoff reaches tolerance {tol:e} at sigma = {sigma_f}"
        ))
    })?;

    let neg_s = Float::with_val(bits, -&s);
    let mut sum = Float::with_val(bits, 0);
    for n in 1..cutoff {
        sum += Float::with_val(bits, n).pow(&neg_s);
    }
    let n_big = Float::with_val(bits, cutoff);
    let n_pow = Float::with_val(bits, n_big.clone().pow(&neg_s));
    let s_minus_one = Float::with_val(bits, &s - 1u32);
    let integral = Float::with_val(bits, &n_pow * &n_big) / &s_minus_one;
    let leading_magnitude = integral.clone();
    sum += integral;
    sum += Float::with_val(bits, &n_pow / 2u32);

    // term_k = b_k * s(s+1)...(s+2k-2) * N^(-s-2k+1)
    let coeffs = bernoulli_coefficients();
    let n_sq = Float::with_val(bits, n_big.square_ref());
    let mut rising = Float::with_val(bits, &s * &n_pow) / &n_big;
    let mut remainder = Float::with_val(bits, 0);
    for k in 1..=corrections + 1 {
        if k > 1 {
            let a = Float::with_val(bits, &s + (2 * k - 3) as u32);
            let b = Float::with_val(bits, &s + (2 * k - 2) as u32);
            rising *= a;
            rising *= b;
            rising /= &n_sq;
        }
        let term = Float::with_val(bits, &rising * &coeffs[k]);
        if k <= corrections {
            sum += term;
        } else {
            remainder = term.abs();
        }
    }

    if remainder.to_f64() >= tol / 2.0 {
        return Err(Error::Precision(format!(
            "Euler-Maclaurin remainder {} exceeds tolerance {tol:e}",
            remainder.to_f64()
        )));
    }
    let magnitude = sum.to_f64().max(leading_magnitude.to_f64());
    let rounding =
        (cutoff as f64 + 2.0 * corrections as f64 + 8.0) * magnitude * 2f64.powi(-(bits as i32));
    if rounding >= tol / 2.0 {
        return Err(Error::Precision(format!(
            "rounding error ~{rounding:e} at {} digits exceeds tolerance {tol:e}",
            prec.working_digits()
        )));
    }
    Ok(sum)
}

pub fn log_zeta_real(sigma: &Float, prec: &PrecisionConfig) -> Result<Float> {
    Ok(zeta_real(sigma, prec)?.ln())
}

/// `log zeta(c) - log zeta(2c)`, nonnegative since zeta decreases on `(1, oo)`.
pub fn log_zeta_ratio(c: &Float, prec: &PrecisionConfig) -> Result<Float> {
    let doubled = Float::with_val(prec.bits(), c * 2u32);
    let num = log_zeta_real(c, prec)?;
    let den = log_zeta_real(&doubled, prec)?;
    Ok(num - den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::float::Constant;

    fn tight() -> PrecisionConfig {
        PrecisionConfig::new(50, 1e-40).unwrap()
    }

    fn f(prec: &PrecisionConfig, x: &str) -> Float {
        prec.parse(x).unwrap()
    }

    #[test]
    fn bernoulli_small_values() {
        let expect = [(1, 1, 6), (2, -1, 30), (3, 1, 42), (4, -1, 30), (5, 5, 66), (6, -691, 2730)];
        for (k, num, den) in expect {
            assert_eq!(bernoulli_even(k).unwrap(), Rational::from((num, den)), "B_{}", 2 * k);
        }
        assert_eq!(bernoulli_even(7).unwrap(), Rational::from(7) / 6);
    }

    #[test]
    fn basel_and_zeta4() {
        let prec = tight();
        let pi = prec.pi();
        let z2 = zeta_real(&prec.float(2), &prec).unwrap();
        let exact2 = Float::with_val(prec.bits(), pi.square_ref()) / 6u32;
        assert!(Float::with_val(prec.bits(), &z2 - &exact2).abs() < 1e-35);
        let z4 = zeta_real(&prec.float(4), &prec).unwrap();
        let exact4 = Float::with_val(prec.bits(), (&pi).pow(4u32)) / 90u32;
        assert!(Float::with_val(prec.bits(), &z4 - &exact4).abs() < 1e-35);
    }

    #[test]
    fn near_pole_matches_laurent() {
        let prec = PrecisionConfig::default();
        for eps in ["1e-3", "1e-6", "4.2826451e-6"] {
            let e = f(&prec, eps);
            let s = Float::with_val(prec.bits(), &e + 1u32);
            let z = zeta_real(&s, &prec).unwrap();
            // zeta(1+e) = 1/e + gamma - gamma_1 e + O(e^2), gamma_1 = -0.0728158...
            let gamma = Float::with_val(prec.bits(), Constant::Euler);
            let laurent = Float::with_val(prec.bits(), e.recip_ref()) + gamma
                + Float::with_val(prec.bits(), &e * 0.072_815_845_483_676_72);
            let rel = (Float::with_val(prec.bits(), &z - &laurent) / &z).abs();
            assert!(rel < 1e-8, "eps={eps}: rel {rel}");
        }
        let z = zeta_real(&f(&prec, "1.000001"), &prec).unwrap();
        assert!((z.to_f64() - 1_000_000.577_215_7).abs() < 1e-6);
    }

    #[test]
    fn matches_direct_summation_bracket() {
        // S_N + (N+1)^(1-s)/(s-1) <= zeta(s) <= S_N + N^(1-s)/(s-1)
        let prec = PrecisionConfig::default();
        let n = 200u32;
        for sigma in [1.5, 2.0, 3.0, 5.0] {
            let s = prec.float(sigma);
            let neg_s = Float::with_val(prec.bits(), -&s);
            let mut partial = prec.float(0);
            for k in 1..=n {
                partial += Float::with_val(prec.bits(), k).pow(&neg_s);
            }
            let sm1 = Float::with_val(prec.bits(), &s - 1u32);
            let neg_sm1 = Float::with_val(prec.bits(), -&sm1);
            let lo = Float::with_val(prec.bits(), Float::with_val(prec.bits(), n + 1).pow(&neg_sm1)) / &sm1;
            let hi = Float::with_val(prec.bits(), Float::with_val(prec.bits(), n).pow(&neg_sm1)) / &sm1;
            let z = zeta_real(&s, &prec).unwrap();
            assert!(z >= Float::with_val(prec.bits(), &partial + &lo), "sigma={sigma}");
            assert!(z <= Float::with_val(prec.bits(), &partial + &hi), "sigma={sigma}");
        }
    }

    #[test]
    fn log_values() {
        let prec = PrecisionConfig::default();
        let l2 = log_zeta_real(&prec.float(2), &prec).unwrap().to_f64();
        assert!((l2 - (std::f64::consts::PI.powi(2) / 6.0).ln()).abs() < 1e-15);

        // Direct summation to 1000 terms; tail < 1000^-9 / 9.
        let direct: f64 = (1..=1000u32).map(|n| f64::from(n).powf(-10.0)).sum::<f64>().ln();
        let l10 = log_zeta_real(&prec.float(10), &prec).unwrap().to_f64();
        assert!((l10 - direct).abs() < 1e-15);
        assert!((l10 - 9.940_808_656_690_607e-4).abs() < 1e-18);

        let s = Float::with_val(prec.bits(), f(&prec, "4.2826451e-6") + 1u32);
        let near = log_zeta_real(&s, &prec).unwrap().to_f64();
        let oracle = (1.0 / 4.2826451e-6 + 0.577_215_664_901_532_9f64).ln();
        assert!((near - oracle).abs() < 1e-9);
        assert!((near - 12.36).abs() < 0.01);

        let ratio = log_zeta_ratio(&prec.float(2), &prec).unwrap().to_f64();
        let pi = std::f64::consts::PI;
        assert!((ratio - ((pi * pi / 6.0).ln() - (pi.powi(4) / 90.0).ln())).abs() < 1e-14);
    }

    #[test]
    fn ratio_matches_integrated_log_derivative() {
        // log zeta(c) - log zeta(2c) = -int_c^2c (log zeta)'(s) ds, derivative by
        // central differences of log_zeta_real.
        let prec = PrecisionConfig::default();
        let c = 1.0428775;
        let h = 1e-5;
        let lz = |x: f64| log_zeta_real(&prec.parse(&format!("{x:.17e}")).unwrap(), &prec).unwrap();
        let deriv = |x: f64| {
            let two_h = prec.float(2.0 * h);
            ((lz(x + h) - lz(x - h)) / two_h).to_f64()
        };
        let integral = crate::quadrature::quad_adaptive(deriv, c, 2.0 * c, 1e-12).unwrap();
        let ratio = log_zeta_ratio(&prec.parse("1.0428775").unwrap(), &prec).unwrap().to_f64();
        assert!((ratio + integral.value).abs() < 1e-8, "{} vs {}", ratio, -integral.value);
    }

    #[test]
    fn domain_errors() {
        let prec = PrecisionConfig::default();
        assert!(matches!(zeta_real(&prec.float(1), &prec), Err(Error::Domain(_))));
        assert!(matches!(zeta_real(&prec.float(0.5), &prec), Err(Error::Domain(_))));
        assert!(matches!(log_zeta_ratio(&prec.float(-2), &prec), Err(Error::Domain(_))));
    }

    #[test]
    fn precision_error_when_tolerance_unreachable() {
        let prec = PrecisionConfig::new(20, 1e-40).unwrap();
        let s = prec.parse("1.000001").unwrap();
        assert!(matches!(zeta_real(&s, &prec), Err(Error::Precision(_))));
    }

    #[test]
    fn tail_bracket() {
        // 3^-s < zeta(s) - 1 - 2^-s < 3^-s (1 + 3/(s - 1))
        let prec = PrecisionConfig::default();
        let bits = prec.bits();
        for sigma in [2u32, 3, 7, 15, 40] {
            let s = prec.float(sigma);
            let z = zeta_real(&s, &prec).unwrap();
            let two = Float::with_val(bits, 2u32).pow(&Float::with_val(bits, -&s));
            let three = Float::with_val(bits, 3u32).pow(&Float::with_val(bits, -&s));
            let tail = z - 1u32 - two;
            let upper = Float::with_val(bits, &three * (1.0 + 3.0 / f64::from(sigma - 1)));
            assert!(tail > three, "sigma={sigma}");
            assert!(tail < upper, "sigma={sigma}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn agrees_with_mpfr(sigma in 1.0001f64..60.0) {
            let prec = PrecisionConfig::new(40, 1e-30).unwrap();
            let s = prec.float(sigma);
            let ours = zeta_real(&s, &prec).unwrap();
            let reference = Float::with_val(prec.bits(), s.zeta_ref());
            let diff = Float::with_val(prec.bits(), &ours - &reference).abs();
            prop_assert!(diff < 1e-29);
        }

        #[test]
        fn strictly_decreasing(a in 1.001f64..50.0, b in 1.001f64..50.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let prec = PrecisionConfig::with_digits(30).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let zl = zeta_real(&prec.float(lo), &prec).unwrap();
            let zh = zeta_real(&prec.float(hi), &prec).unwrap();
            prop_assert!(zl > zh);
        }

        #[test]
        fn ratio_nonnegative(c in 1.0001f64..30.0) {
            let prec = PrecisionConfig::with_digits(30).unwrap();
            prop_assert!(log_zeta_ratio(&prec.float(c), &prec).unwrap() >= 0);
        }
    }
}
