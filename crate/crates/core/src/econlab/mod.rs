//! Estimators: ability intervals, fixed-effects least squares, 2SLS, feedback
//! symmetry tests and the panel regressions built on them.

pub mod ability;
pub mod feedback;
pub mod iv;
pub mod ols;
pub mod regressions;
pub mod special;
pub mod summary;
pub mod transform;

use thiserror::Error;

pub use ability::{ability_table, clopper_pearson, AbilityEstimate, AbilityTable};
pub use feedback::{
    categorize_feedback, feedback_regression, restrict_all_buckets, Categorized, FeedbackCategory,
    FeedbackMode, FeedbackSpec,
};
pub use iv::two_sls;
pub use ols::{ols_robust, Covariance, RegressionResult, WaldTest};
pub use regressions::{
    heterogeneity_regression, learning_regression, panel_two_sls, Absorb, Design, FinancialOutcome,
    HeterogeneitySpec, IvSpec, LearningDependent, LearningSpec,
};
pub use transform::{ihs, ihs_inverse, two_way_within, within_transform};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("design matrix is rank deficient: `{column}` is collinear with {others:?}")]
    Collinear { column: String, others: Vec<String> },
    #[error("insufficient observations: {n_obs} rows for {parameters} parameters")]
    InsufficientData { n_obs: usize, parameters: usize },
    #[error("two-way demeaning did not converge within {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid specification: {0}")]
    Specification(String),
    #[error("panel: {0}")]
    Panel(String),
}

impl From<crate::panel::PanelError> for EstimationError {
    fn from(e: crate::panel::PanelError) -> Self {
        EstimationError::Panel(e.to_string())
    }
}
