//! Two-stage least squares with a robust first-stage partial F.

use nalgebra::{DMatrix, DVector};

use super::ols::{least_squares, ols_robust, sandwich, RegressionResult};
use super::EstimationError;

/// Default partial-F threshold below which an instrument is flagged weak.
pub const WEAK_INSTRUMENT_F: f64 = 10.0;

/// Column names for one endogenous regressor, its excluded instruments and
/// the included exogenous controls.
#[derive(Debug, Clone)]
pub struct IvNames {
    pub endogenous: String,
    pub instruments: Vec<String>,
    pub controls: Vec<String>,
}

/// 2SLS on data already demeaned for `absorbed` fixed effects.
///
/// The first stage regresses the endogenous column on instruments and
/// controls; `partial_f` is the robust Wald statistic for the excluded
/// instruments divided by their number. The second-stage covariance is the
/// usual sandwich with residuals evaluated at the observed endogenous column.
#[allow(clippy::too_many_arguments)]
pub fn two_sls(
    y: &DVector<f64>,
    endogenous: &DVector<f64>,
    instruments: &DMatrix<f64>,
    controls: &DMatrix<f64>,
    names: &IvNames,
    absorbed: usize,
    clusters: Option<&[u64]>,
    weak_threshold: f64,
) -> Result<RegressionResult, EstimationError> {
    let n = y.len();
    let m = instruments.ncols();
    let k = controls.ncols();
    if endogenous.len() != n || instruments.nrows() != n || controls.nrows() != n {
        return Err(EstimationError::Dimension("2SLS inputs differ in length".into()));
    }
    if m == 0 || names.instruments.len() != m || names.controls.len() != k {
        return Err(EstimationError::Specification(
            "2SLS needs at least one named instrument and a name per control".into(),
        ));
    }

    let mut first_x = DMatrix::zeros(n, m + k);
    first_x.columns_mut(0, m).copy_from(instruments);
    first_x.columns_mut(m, k).copy_from(controls);
    let first_names: Vec<String> = names
        .instruments
        .iter()
        .chain(&names.controls)
        .cloned()
        .collect();
    let first = ols_robust(endogenous, &first_x, &first_names, absorbed, clusters)?;
    let bz = DVector::from_iterator(m, first.coefficients[..m].iter().copied());
    let vzz = first.covariance.view((0, 0), (m, m)).into_owned();
    let partial_f = match vzz.clone().try_inverse() {
        Some(inv) => (bz.transpose() * inv * &bz)[(0, 0)] / m as f64,
        None => f64::INFINITY,
    };
    let fitted = &first_x * DVector::from_vec(first.coefficients.clone());

    let mut second_names = vec![names.endogenous.clone()];
    second_names.extend(names.controls.iter().cloned());
    let mut x_hat = DMatrix::zeros(n, 1 + k);
    x_hat.set_column(0, &fitted);
    x_hat.columns_mut(1, k).copy_from(controls);
    let ls = least_squares(&x_hat, y, &second_names)?;

    let mut x_obs = x_hat.clone();
    x_obs.set_column(0, endogenous);
    let resid = y - &x_obs * &ls.beta;
    let k_total = absorbed + 1 + k;
    if n <= k_total {
        return Err(EstimationError::InsufficientData {
            n_obs: n,
            parameters: k_total,
        });
    }
    let covariance = sandwich(&x_hat, &resid, &ls.bread, k_total, clusters);

    Ok(RegressionResult {
        dependent: String::new(),
        names: second_names,
        coefficients: ls.beta.iter().copied().collect(),
        covariance,
        n_obs: n,
        n_individuals: 0,
        n_weeks: 0,
        absorbed,
        df: n - k_total,
        individual_effects: false,
        week_effects: false,
        partial_f: Some(partial_f),
        weak_instrument: !(partial_f >= weak_threshold),
        wald: Vec::new(),
        statistics: vec![("first_stage_coefficient".into(), first.coefficients[0])],
        warnings: Vec::new(),
    })
}
