//! Log-gamma, the regularized incomplete beta function and its inverse.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("beta shape parameters must be positive, got a={a}, b={b}")]
    Shape { a: f64, b: f64 },
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("beta quantile did not converge within {0} iterations")]
    NoConvergence(usize),
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const CF_MAX_ITER: usize = 1_000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Continued fraction for `I_x(a, b)` (modified Lentz), valid for
/// `x < (a + 1) / (a + b + 2)`.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> Result<f64, SpecialError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(SpecialError::Shape { a, b });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(SpecialError::Probability(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front.exp() * beta_continued_fraction(a, b, x) / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b).clamp(0.0, 1.0))
    }
}

/// Beta density, used for Newton steps on the quantile.
fn beta_pdf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)).exp()
}

pub const QUANTILE_TOL: f64 = 1e-10;
pub const QUANTILE_MAX_ITER: usize = 200;

/// Inverse of `x ↦ I_x(a, b)`: bisection on a shrinking bracket, taking a Newton
/// step instead whenever it lands strictly inside the bracket.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> Result<f64, SpecialError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(SpecialError::Shape { a, b });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(SpecialError::Probability(p));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = a / (a + b);
    for _ in 0..QUANTILE_MAX_ITER {
        let f = beta_inc(a, b, x)? - p;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < QUANTILE_TOL * 1e-2 {
            return Ok(0.5 * (lo + hi));
        }
        let density = beta_pdf(a, b, x);
        let newton = if density > 0.0 && density.is_finite() {
            x - f / density
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() < QUANTILE_TOL * 1e-2 {
            return Ok(next);
        }
        x = next;
    }
    Err(SpecialError::NoConvergence(QUANTILE_MAX_ITER))
}

/// Two-sided standard normal critical value for a confidence level.
pub fn normal_critical(level: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

/// Survival function of a chi-square variable with one degree of freedom.
pub fn chi2_1_sf(stat: f64) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    statrs::function::erf::erfc((stat / 2.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..30 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0));
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn beta_inc_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b
        for &x in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            assert!((beta_inc(1.0, 1.0, x).unwrap() - x).abs() < 1e-14);
            assert!((beta_inc(3.0, 1.0, x).unwrap() - x.powi(3)).abs() < 1e-14);
            assert!((beta_inc(1.0, 4.0, x).unwrap() - (1.0 - (1.0 - x).powi(4))).abs() < 1e-14);
        }
    }

    #[test]
    fn beta_inc_symmetry() {
        for &(a, b, x) in &[(2.5, 7.0, 0.3), (40.0, 61.0, 0.45), (300.0, 700.0, 0.31)] {
            let lhs = beta_inc(a, b, x).unwrap();
            let rhs = 1.0 - beta_inc(b, a, 1.0 - x).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn beta_inc_agrees_with_statrs() {
        for &(a, b, x) in &[(0.5, 0.5, 0.1), (5.0, 3.0, 0.6), (33.0, 68.0, 0.25), (501.0, 1000.0, 0.34)] {
            let ours = beta_inc(a, b, x).unwrap();
            let theirs = statrs::function::beta::beta_reg(a, b, x);
            assert!((ours - theirs).abs() < 1e-12, "{a} {b} {x}: {ours} vs {theirs}");
        }
    }

    #[test]
    fn quantile_inverts() {
        for &(a, b) in &[(1.0, 1.0), (2.0, 9.0), (33.0, 68.0), (0.7, 0.4), (800.0, 200.0)] {
            for &p in &[1e-6, 0.025, 0.3, 0.5, 0.975, 1.0 - 1e-9] {
                // the root is bracketed within the absolute tolerance in x
                let x = beta_quantile(p, a, b).unwrap();
                let below = beta_inc(a, b, (x - QUANTILE_TOL).max(0.0)).unwrap();
                let above = beta_inc(a, b, (x + QUANTILE_TOL).min(1.0)).unwrap();
                assert!(below <= p && p <= above, "{a} {b} {p}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(beta_inc(0.0, 1.0, 0.5).is_err());
        assert!(beta_inc(1.0, 1.0, 1.5).is_err());
        assert!(beta_quantile(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn critical_values() {
        assert!((normal_critical(0.95) - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((chi2_1_sf(1.959_963_984_540_054f64.powi(2)) - 0.05).abs() < 1e-9);
        assert_eq!(chi2_1_sf(0.0), 1.0);
    }
}
