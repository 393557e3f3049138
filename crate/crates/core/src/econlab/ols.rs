//! Least squares through a Householder QR with heteroskedasticity-robust
//! (HC1) or individual-clustered sandwich covariance.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::special::{chi2_1_sf, normal_critical};
use super::EstimationError;

/// A column whose QR pivot is this small relative to its own norm is treated
/// as a linear combination of the columns before it.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Covariance {
    /// White covariance scaled by n / (n − k_total).
    #[default]
    Hc1,
    /// Clustered by individual, scaled by G/(G−1) · (n−1)/(n−k_total).
    ClusterIndividual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldTest {
    pub label: String,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub dependent: String,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub n_obs: usize,
    pub n_individuals: usize,
    pub n_weeks: usize,
    /// Fixed effects swept out before estimation.
    pub absorbed: usize,
    pub df: usize,
    pub individual_effects: bool,
    pub week_effects: bool,
    pub partial_f: Option<f64>,
    pub weak_instrument: bool,
    pub wald: Vec<WaldTest>,
    /// Named scalars specific to an analysis (e.g. effect sizes).
    pub statistics: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl RegressionResult {
    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn index(&self, name: &str) -> usize {
        self.position(name)
            .unwrap_or_else(|| panic!("no coefficient named `{name}` in {:?}", self.names))
    }

    pub fn coef(&self, name: &str) -> f64 {
        self.coefficients[self.index(name)]
    }

    pub fn se(&self, name: &str) -> f64 {
        let i = self.index(name);
        self.covariance[(i, i)].max(0.0).sqrt()
    }

    pub fn t_stat(&self, name: &str) -> f64 {
        self.coef(name) / self.se(name)
    }

    /// Two-sided normal p-value.
    pub fn p_value(&self, name: &str) -> f64 {
        chi2_1_sf(self.t_stat(name).powi(2))
    }

    pub fn confidence_interval(&self, name: &str, level: f64) -> (f64, f64) {
        let z = normal_critical(level);
        let (b, s) = (self.coef(name), self.se(name));
        (b - z * s, b + z * s)
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    pub fn wald_test(&self, label: &str) -> Option<&WaldTest> {
        self.wald.iter().find(|w| w.label == label)
    }

    /// Wald test of `Σ w_j β_j = value` against χ²(1).
    pub fn linear_wald(
        &self,
        label: &str,
        weights: &[(&str, f64)],
        value: f64,
    ) -> Result<WaldTest, EstimationError> {
        let k = self.names.len();
        let mut w = DVector::zeros(k);
        for &(name, weight) in weights {
            let i = self.position(name).ok_or_else(|| {
                EstimationError::Specification(format!("no coefficient named `{name}`"))
            })?;
            w[i] += weight;
        }
        let estimate: f64 = (0..k).map(|i| w[i] * self.coefficients[i]).sum::<f64>() - value;
        let variance = (w.transpose() * &self.covariance * &w)[(0, 0)];
        let statistic = if variance > 0.0 {
            estimate * estimate / variance
        } else if estimate == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(WaldTest {
            label: label.to_string(),
            statistic,
            p_value: chi2_1_sf(statistic),
        })
    }
}

/// Coefficients and `(X'X)⁻¹` from a QR factorization.
pub(crate) struct LeastSquares {
    pub beta: DVector<f64>,
    pub bread: DMatrix<f64>,
}

pub(crate) fn least_squares(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
) -> Result<LeastSquares, EstimationError> {
    let (n, k) = x.shape();
    if y.len() != n || names.len() != k {
        return Err(EstimationError::Dimension(format!(
            "X is {n}×{k}, y has {} rows, {} names",
            y.len(),
            names.len()
        )));
    }
    if n <= k {
        return Err(EstimationError::InsufficientData {
            n_obs: n,
            parameters: k,
        });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = x.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm {
            let others = if j == 0 || norm == 0.0 {
                Vec::new()
            } else {
                let r11 = r.view((0, 0), (j, j)).into_owned();
                let rhs = r.view((0, j), (j, 1)).into_owned();
                let c = r11
                    .solve_upper_triangular(&rhs)
                    .unwrap_or_else(|| DMatrix::zeros(j, 1));
                (0..j)
                    .filter(|&i| c[(i, 0)].abs() > 1e-8)
                    .map(|i| names[i].clone())
                    .collect()
            };
            return Err(EstimationError::Collinear {
                column: names[j].clone(),
                others,
            });
        }
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, k).into_owned();
    let beta = r
        .solve_upper_triangular(&rhs)
        .expect("nonsingular R after rank check");
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .expect("nonsingular R after rank check");
    let bread = &r_inv * r_inv.transpose();
    Ok(LeastSquares { beta, bread })
}

/// `bread · meat · bread` with the finite-sample scaling of the chosen rule.
pub(crate) fn sandwich(
    x: &DMatrix<f64>,
    resid: &DVector<f64>,
    bread: &DMatrix<f64>,
    k_total: usize,
    clusters: Option<&[u64]>,
) -> DMatrix<f64> {
    let (n, k) = x.shape();
    let dof = (n - k_total) as f64;
    let meat = match clusters {
        None => {
            let mut xe = x.clone();
            for j in 0..k {
                for (v, e) in xe.column_mut(j).iter_mut().zip(resid.iter()) {
                    *v *= e;
                }
            }
            xe.tr_mul(&xe) * (n as f64 / dof)
        }
        Some(ids) => {
            let mut slot: HashMap<u64, usize> = HashMap::new();
            for &id in ids {
                let next = slot.len();
                slot.entry(id).or_insert(next);
            }
            let g = slot.len();
            let mut scores = DMatrix::<f64>::zeros(g, k);
            for j in 0..k {
                for i in 0..n {
                    scores[(slot[&ids[i]], j)] += x[(i, j)] * resid[i];
                }
            }
            let scale = if g > 1 {
                (g as f64 / (g as f64 - 1.0)) * ((n as f64 - 1.0) / dof)
            } else {
                1.0
            };
            scores.tr_mul(&scores) * scale
        }
    };
    let v = bread * meat * bread;
    (&v + v.transpose()) * 0.5
}

/// OLS of `y` on the columns of `x`, which have already been demeaned for
/// `absorbed` fixed effects. Counts for individuals and weeks are left at
/// zero for the caller to fill in.
pub fn ols_robust(
    y: &DVector<f64>,
    x: &DMatrix<f64>,
    names: &[String],
    absorbed: usize,
    clusters: Option<&[u64]>,
) -> Result<RegressionResult, EstimationError> {
    let (n, k) = x.shape();
    let k_total = absorbed + k;
    if n <= k_total {
        return Err(EstimationError::InsufficientData {
            n_obs: n,
            parameters: k_total,
        });
    }
    if let Some(ids) = clusters {
        if ids.len() != n {
            return Err(EstimationError::Dimension(format!(
                "{} cluster labels for {n} rows",
                ids.len()
            )));
        }
    }
    let ls = least_squares(x, y, names)?;
    let resid = y - x * &ls.beta;
    let covariance = sandwich(x, &resid, &ls.bread, k_total, clusters);
    Ok(RegressionResult {
        dependent: String::new(),
        names: names.to_vec(),
        coefficients: ls.beta.iter().copied().collect(),
        covariance,
        n_obs: n,
        n_individuals: 0,
        n_weeks: 0,
        absorbed,
        df: n - k_total,
        individual_effects: false,
        week_effects: false,
        partial_f: None,
        weak_instrument: false,
        wald: Vec::new(),
        statistics: Vec::new(),
        warnings: Vec::new(),
    })
}
