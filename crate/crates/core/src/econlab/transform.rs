//! Inverse hyperbolic sine and fixed-effect demeaning.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::EstimationError;

/// `ln(x + √(x² + 1))`.
pub fn ihs(x: f64) -> f64 {
    x.asinh()
}

pub fn ihs_inverse(y: f64) -> f64 {
    y.sinh()
}

/// Map arbitrary labels to `0..G` in order of first appearance.
pub(crate) fn dense_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (dense, map.len())
}

fn demean_columns(m: &mut DMatrix<f64>, groups: &[usize], n_groups: usize) -> f64 {
    let mut counts = vec![0.0; n_groups];
    for &g in groups {
        counts[g] += 1.0;
    }
    let mut sums = vec![0.0; n_groups];
    let mut largest = 0.0_f64;
    for mut col in m.column_iter_mut() {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (v, &g) in col.iter().zip(groups) {
            sums[g] += v;
        }
        for (s, c) in sums.iter_mut().zip(&counts) {
            *s /= c;
        }
        for (v, &g) in col.iter_mut().zip(groups) {
            *v -= sums[g];
        }
        largest = sums.iter().fold(largest, |a, s| a.max(s.abs()));
    }
    largest
}

/// Subtract group means from every column.
pub fn within_transform<T: Copy + Eq + std::hash::Hash>(
    m: &DMatrix<f64>,
    groups: &[T],
) -> Result<DMatrix<f64>, EstimationError> {
    if groups.len() != m.nrows() {
        return Err(EstimationError::Dimension(format!(
            "{} group labels for {} rows",
            groups.len(),
            m.nrows()
        )));
    }
    let (dense, g) = dense_labels(groups);
    let mut out = m.clone();
    demean_columns(&mut out, &dense, g);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoWayOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for TwoWayOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoWayDemeaned {
    pub matrix: DMatrix<f64>,
    pub n_individuals: usize,
    pub n_weeks: usize,
    /// Connected components of the individual–week graph.
    pub components: usize,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl TwoWayDemeaned {
    /// Dimension of the span of both dummy sets.
    pub fn absorbed(&self) -> usize {
        self.n_individuals + self.n_weeks - self.components
    }
}

/// Alternating projections onto the individual and week mean spaces until a
/// sweep moves no entry by more than the tolerance.
pub fn two_way_within<A, B>(
    m: &DMatrix<f64>,
    individuals: &[A],
    weeks: &[B],
    options: TwoWayOptions,
) -> Result<TwoWayDemeaned, EstimationError>
where
    A: Copy + Eq + std::hash::Hash,
    B: Copy + Eq + std::hash::Hash,
{
    let n = m.nrows();
    if individuals.len() != n || weeks.len() != n {
        return Err(EstimationError::Dimension(format!(
            "{} individual and {} week labels for {n} rows",
            individuals.len(),
            weeks.len()
        )));
    }
    let (ind, n_ind) = dense_labels(individuals);
    let (wk, n_wk) = dense_labels(weeks);
    let components = connected_components(&ind, n_ind, &wk, n_wk);
    let mut warnings = Vec::new();
    if components > 1 {
        warnings.push(format!(
            "individual-week graph has {components} connected components; effects are identified within components only"
        ));
    }
    let mut out = m.clone();
    let mut change = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        let a = demean_columns(&mut out, &ind, n_ind);
        let b = demean_columns(&mut out, &wk, n_wk);
        change = a.max(b);
        if change < options.tolerance {
            return Ok(TwoWayDemeaned {
                matrix: out,
                n_individuals: n_ind,
                n_weeks: n_wk,
                components,
                iterations: iteration,
                warnings,
            });
        }
    }
    Err(EstimationError::NoConvergence {
        iterations: options.max_iterations,
        change,
    })
}

fn connected_components(ind: &[usize], n_ind: usize, wk: &[usize], n_wk: usize) -> usize {
    let mut parent: Vec<usize> = (0..n_ind + n_wk).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (&i, &w) in ind.iter().zip(wk) {
        let (a, b) = (find(&mut parent, i), find(&mut parent, n_ind + w));
        if a != b {
            parent[a] = b;
        }
    }
    (0..n_ind + n_wk)
        .filter(|&x| find(&mut parent, x) == x)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ihs_values() {
        assert_eq!(ihs(0.0), 0.0);
        let direct = (100.0_f64 + (100.0_f64 * 100.0 + 1.0).sqrt()).ln();
        assert!((ihs(100.0) - direct).abs() < 1e-14);
        assert!((ihs(100.0) - 5.298_342_365_610_589).abs() < 1e-12);
        for x in [10.0, 37.5, 1e3, 1e6] {
            assert!((ihs(x) - (2.0 * x).ln()).abs() < 0.003);
        }
        for x in [-5.0, -0.1, 0.3, 42.0, 1e5] {
            assert_eq!(ihs(-x), -ihs(x));
            assert!((ihs_inverse(ihs(x)) - x).abs() < 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn within_small_cases() {
        let m = DMatrix::from_column_slice(4, 1, &[1.0, 3.0, 10.0, 10.0]);
        let out = within_transform(&m, &[1, 1, 2, 2]).unwrap();
        assert_eq!(out.as_slice(), &[-1.0, 1.0, 0.0, 0.0]);
        let single = within_transform(&m, &[0, 0, 0, 0]).unwrap();
        let mean = 6.0;
        for i in 0..4 {
            assert_eq!(single[(i, 0)], m[(i, 0)] - mean);
        }
    }

    #[test]
    fn within_group_means_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let groups: Vec<u32> = (0..500).map(|_| rng.random_range(0..40)).collect();
        let m = DMatrix::from_fn(500, 3, |_, _| rng.random_range(-50.0..50.0));
        let out = within_transform(&m, &groups).unwrap();
        for g in 0..40 {
            for j in 0..3 {
                let vals: Vec<f64> = (0..500).filter(|&i| groups[i] == g).map(|i| out[(i, j)]).collect();
                if !vals.is_empty() {
                    assert!(vals.iter().sum::<f64>().abs() / vals.len() as f64 <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn balanced_two_by_two_double_demeaning() {
        // rows: (i, t) = (a,1), (a,2), (b,1), (b,2)
        let y = [1.0, 4.0, 2.0, 9.0];
        let m = DMatrix::from_column_slice(4, 1, &y);
        let out = two_way_within(&m, &[0, 0, 1, 1], &[1, 2, 1, 2], TwoWayOptions::default()).unwrap();
        let grand = y.iter().sum::<f64>() / 4.0;
        let yi = [2.5, 2.5, 5.5, 5.5];
        let yt = [1.5, 6.5, 1.5, 6.5];
        for k in 0..4 {
            assert!((out.matrix[(k, 0)] - (y[k] - yi[k] - yt[k] + grand)).abs() < 1e-12);
        }
        assert_eq!(out.components, 1);
        assert_eq!(out.absorbed(), 3);
    }

    #[test]
    fn single_individual_reduces_to_week_demeaning() {
        let m = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 6.0]);
        let out = two_way_within(&m, &[7, 7, 7], &[0, 1, 1], TwoWayOptions::default()).unwrap();
        let weekly = within_transform(&m, &[0, 1, 1]).unwrap();
        assert!((out.matrix - weekly).abs().max() < 1e-12);
    }

    #[test]
    fn disconnected_graph_is_warned() {
        let m = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 5.0]);
        let out = two_way_within(&m, &[0, 0, 1, 1], &[0, 1, 2, 3], TwoWayOptions::default()).unwrap();
        assert_eq!(out.components, 2);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 300;
        let ind: Vec<u32> = (0..n).map(|_| rng.random_range(0..30)).collect();
        let wk: Vec<u32> = (0..n).map(|_| rng.random_range(0..20)).collect();
        let m = DMatrix::from_fn(n, 1, |_, _| rng.random::<f64>());
        let opts = TwoWayOptions {
            tolerance: 1e-10,
            max_iterations: 2,
        };
        assert!(matches!(
            two_way_within(&m, &ind, &wk, opts),
            Err(EstimationError::NoConvergence { .. })
        ));
    }
}
