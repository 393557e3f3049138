//! Exact intervals: tail equations and guaranteed coverage.

use betlearn::econlab::clopper_pearson;
use betlearn::jackpot::binomial_upper_tail;

fn pmf(n: u64, k: u64, p: f64) -> f64 {
    let ln_c: f64 = (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum();
    (ln_c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

#[test]
fn bounds_solve_the_tail_equations() {
    for m in [1u64, 5, 17, 60, 300] {
        for s in 0..=m {
            let ci = clopper_pearson(s, m, 0.95).unwrap();
            if s > 0 {
                // P(X >= s | lower) = 2.5%
                let tail: f64 = (s..=m).map(|k| pmf(m, k, ci.lower)).sum();
                assert!((tail - 0.025).abs() < 1e-8, "m {m} s {s}: {tail}");
            }
            if s < m {
                let tail: f64 = (0..=s).map(|k| pmf(m, k, ci.upper)).sum();
                assert!((tail - 0.025).abs() < 1e-8, "m {m} s {s}: {tail}");
            }
        }
    }
}

#[test]
fn exact_coverage_never_below_nominal() {
    for m in [10u64, 17, 40, 100] {
        let intervals: Vec<_> = (0..=m).map(|s| clopper_pearson(s, m, 0.9).unwrap()).collect();
        for i in 1..100 {
            let theta = i as f64 / 100.0;
            let coverage: f64 = (0..=m)
                .filter(|&s| intervals[s as usize].covers(theta))
                .map(|s| pmf(m, s, theta))
                .sum();
            assert!(coverage >= 0.9 - 1e-12, "m {m} theta {theta}: {coverage}");
        }
    }
}

#[test]
fn intervals_nest_as_level_rises() {
    for (s, m) in [(0u64, 20u64), (7, 20), (20, 20), (150, 500)] {
        let narrow = clopper_pearson(s, m, 0.8).unwrap();
        let wide = clopper_pearson(s, m, 0.99).unwrap();
        assert!(wide.lower <= narrow.lower && narrow.upper <= wide.upper);
    }
}

#[test]
fn upper_tail_agrees_with_summed_pmf() {
    for (n, k, p) in [(17u64, 12u64, 1.0 / 3.0), (13, 10, 0.5), (100, 60, 0.45), (500, 0, 0.2)] {
        let direct: f64 = (k..=n).map(|j| pmf(n, j, p)).sum();
        let lib = binomial_upper_tail(n, k, p);
        assert!((lib - direct).abs() <= 1e-12 * direct.max(1e-300).max(1.0), "{n} {k} {p}");
    }
}
