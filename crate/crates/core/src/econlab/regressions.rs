//! Panel regressions: learning from last week's results, the IV design for
//! financial outcomes, and the lagged-ability heterogeneity check.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::iv::{two_sls, IvNames, WEAK_INSTRUMENT_F};
use super::ols::{ols_robust, Covariance, RegressionResult};
use super::transform::{dense_labels, ihs, two_way_within, within_transform, TwoWayOptions};
use super::EstimationError;
use crate::panel::{PanelObservation, PanelView};

/// Which fixed effects are swept out before estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Absorb {
    /// Pooled with an explicit constant.
    None,
    #[default]
    Individual,
    Week,
    IndividualAndWeek,
}

/// Rows of a regression sample before any demeaning.
#[derive(Debug, Clone)]
pub struct Design {
    pub dependent: String,
    pub names: Vec<String>,
    pub y: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
    pub ids: Vec<u64>,
    pub weeks: Vec<u32>,
}

impl Design {
    pub fn new(dependent: impl Into<String>, names: Vec<String>) -> Self {
        let k = names.len();
        Self {
            dependent: dependent.into(),
            names,
            y: Vec::new(),
            columns: vec![Vec::new(); k],
            ids: Vec::new(),
            weeks: Vec::new(),
        }
    }

    pub fn push(&mut self, y: f64, x: &[f64], id: u64, week: u32) {
        debug_assert_eq!(x.len(), self.columns.len());
        self.y.push(y);
        for (c, v) in self.columns.iter_mut().zip(x) {
            c.push(*v);
        }
        self.ids.push(id);
        self.weeks.push(week);
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn n_individuals(&self) -> usize {
        self.ids.iter().collect::<HashSet<_>>().len()
    }

    fn n_weeks(&self) -> usize {
        self.weeks.iter().collect::<HashSet<_>>().len()
    }

    /// `[y, x_1, …, x_k]` after absorbing fixed effects, plus the number of
    /// absorbed parameters and any warnings. `Absorb::None` appends a constant.
    fn transformed(
        &self,
        absorb: Absorb,
    ) -> Result<(DMatrix<f64>, Vec<String>, usize, Vec<String>), EstimationError> {
        let n = self.len();
        let k = self.columns.len();
        let extra = usize::from(absorb == Absorb::None);
        let mut m = DMatrix::zeros(n, 1 + k + extra);
        m.set_column(0, &DVector::from_column_slice(&self.y));
        for (j, c) in self.columns.iter().enumerate() {
            m.set_column(1 + j, &DVector::from_column_slice(c));
        }
        let mut names = self.names.clone();
        let mut warnings = Vec::new();
        let absorbed = match absorb {
            Absorb::None => {
                m.column_mut(1 + k).fill(1.0);
                names.push("constant".into());
                0
            }
            Absorb::Individual => {
                m = within_transform(&m, &self.ids)?;
                dense_labels(&self.ids).1
            }
            Absorb::Week => {
                m = within_transform(&m, &self.weeks)?;
                dense_labels(&self.weeks).1
            }
            Absorb::IndividualAndWeek => {
                let out = two_way_within(&m, &self.ids, &self.weeks, TwoWayOptions::default())?;
                warnings = out.warnings.clone();
                let absorbed = out.absorbed();
                m = out.matrix;
                absorbed
            }
        };
        Ok((m, names, absorbed, warnings))
    }

    fn finish(&self, mut r: RegressionResult, absorb: Absorb, warnings: Vec<String>) -> RegressionResult {
        r.dependent = self.dependent.clone();
        r.n_individuals = self.n_individuals();
        r.n_weeks = self.n_weeks();
        r.individual_effects = matches!(absorb, Absorb::Individual | Absorb::IndividualAndWeek);
        r.week_effects = matches!(absorb, Absorb::Week | Absorb::IndividualAndWeek);
        r.warnings.extend(warnings);
        r
    }

    fn clusters(&self, covariance: Covariance) -> Option<&[u64]> {
        match covariance {
            Covariance::Hc1 => None,
            Covariance::ClusterIndividual => Some(&self.ids),
        }
    }

    pub fn ols(&self, absorb: Absorb, covariance: Covariance) -> Result<RegressionResult, EstimationError> {
        if self.is_empty() {
            return Err(EstimationError::InsufficientData {
                n_obs: 0,
                parameters: self.columns.len(),
            });
        }
        let (m, names, absorbed, warnings) = self.transformed(absorb)?;
        let y = m.column(0).into_owned();
        let x = m.columns(1, m.ncols() - 1).into_owned();
        let r = ols_robust(&y, &x, &names, absorbed, self.clusters(covariance))?;
        Ok(self.finish(r, absorb, warnings))
    }

    /// Column 0 is endogenous, columns `1..=n_instruments` are excluded
    /// instruments, the rest are controls.
    pub fn two_sls(
        &self,
        n_instruments: usize,
        absorb: Absorb,
        covariance: Covariance,
        weak_threshold: f64,
    ) -> Result<RegressionResult, EstimationError> {
        if self.is_empty() {
            return Err(EstimationError::InsufficientData {
                n_obs: 0,
                parameters: self.columns.len(),
            });
        }
        let (m, names, absorbed, warnings) = self.transformed(absorb)?;
        let y = m.column(0).into_owned();
        let d = m.column(1).into_owned();
        let z = m.columns(2, n_instruments).into_owned();
        let n_controls = m.ncols() - 2 - n_instruments;
        let w = m.columns(2 + n_instruments, n_controls).into_owned();
        let iv_names = IvNames {
            endogenous: names[0].clone(),
            instruments: names[1..=n_instruments].to_vec(),
            controls: names[1 + n_instruments..].to_vec(),
        };
        let r = two_sls(&y, &d, &z, &w, &iv_names, absorbed, self.clusters(covariance), weak_threshold)?;
        Ok(self.finish(r, absorb, warnings))
    }
}

fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningDependent {
    PlacedJackpot,
    IhsExpenditure,
}

impl LearningDependent {
    pub fn label(self) -> &'static str {
        match self {
            LearningDependent::PlacedJackpot => "placed_jackpot",
            LearningDependent::IhsExpenditure => "ihs_betting_expenditure",
        }
    }

    fn value(self, row: &PanelObservation) -> f64 {
        match self {
            LearningDependent::PlacedJackpot => f64::from(u8::from(row.placed_jackpot)),
            LearningDependent::IhsExpenditure => ihs(row.betting_expenditure),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningSpec {
    pub lag: u32,
    pub dependent: LearningDependent,
    pub absorb: Absorb,
    pub covariance: Covariance,
}

impl LearningSpec {
    pub fn new(dependent: LearningDependent) -> Self {
        Self {
            lag: 1,
            dependent,
            absorb: Absorb::Individual,
            covariance: Covariance::Hc1,
        }
    }
}

pub fn share_lag_name(lag: u32) -> String {
    format!("share_correct_lag{lag}")
}

/// Rows `t` whose week `t − lag` had jackpot picks and no prize.
fn lagged_sample<'a>(
    view: &'a PanelView<'a>,
    lag: u32,
) -> impl Iterator<Item = (&'a PanelObservation, &'a PanelObservation)> + 'a {
    let rows = view.rows();
    (0..rows.len()).filter_map(move |i| {
        let j = view.shifted(i, -(lag as i64))?;
        let prev = &rows[j];
        (prev.share_correct.is_some() && !prev.won_prize).then_some((&rows[i], prev))
    })
}

/// Dependent at `t` on `share_correct` at `t − lag`, controlling for that
/// week's midweek and weekend ticket counts.
pub fn learning_regression(
    panel: &[PanelObservation],
    spec: &LearningSpec,
) -> Result<RegressionResult, EstimationError> {
    if spec.lag == 0 {
        return Err(EstimationError::Specification("lag must be at least 1".into()));
    }
    let view = PanelView::new(panel)?;
    let share = share_lag_name(spec.lag);
    let mut design = Design::new(
        spec.dependent.label(),
        vec![
            share.clone(),
            format!("tickets_midweek_lag{}", spec.lag),
            format!("tickets_weekend_lag{}", spec.lag),
        ],
    );
    for (row, prev) in lagged_sample(&view, spec.lag) {
        design.push(
            spec.dependent.value(row),
            &[
                prev.share_correct.unwrap_or_default(),
                prev.tickets_midweek as f64,
                prev.tickets_weekend as f64,
            ],
            row.individual_id,
            row.week,
        );
    }
    let sd = sample_sd(&design.columns[0]);
    let mut r = design.ols(spec.absorb, spec.covariance)?;
    let beta = r.coef(&share);
    r.statistics.push(("sd_share_correct".into(), sd));
    // one standard deviation of last week's share, in percentage points
    // (or percent for the IHS outcome)
    r.statistics.push(("effect_one_sd".into(), 100.0 * beta * sd));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinancialOutcome {
    SavingsWithdrawal,
    SavingsDeposit,
    NetSavings,
    LoanApplied,
    LoansReceived,
    LoanRepayments,
}

impl FinancialOutcome {
    pub const ALL: [FinancialOutcome; 6] = [
        FinancialOutcome::SavingsWithdrawal,
        FinancialOutcome::SavingsDeposit,
        FinancialOutcome::NetSavings,
        FinancialOutcome::LoanApplied,
        FinancialOutcome::LoansReceived,
        FinancialOutcome::LoanRepayments,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FinancialOutcome::SavingsWithdrawal => "savings_withdrawal",
            FinancialOutcome::SavingsDeposit => "savings_deposit",
            FinancialOutcome::NetSavings => "net_savings",
            FinancialOutcome::LoanApplied => "loan_applied",
            FinancialOutcome::LoansReceived => "loans_received",
            FinancialOutcome::LoanRepayments => "loan_repayments",
        }
    }

    pub fn units(self) -> &'static str {
        match self {
            FinancialOutcome::NetSavings => "KSH",
            FinancialOutcome::LoanApplied => "Indicator",
            _ => "Elasticity",
        }
    }

    /// IHS of the KSH amount for elasticities, raw KSH for net savings and
    /// 0/1 for the loan application indicator.
    pub fn value(self, row: &PanelObservation) -> f64 {
        match self {
            FinancialOutcome::SavingsWithdrawal => ihs(row.savings_withdrawal),
            FinancialOutcome::SavingsDeposit => ihs(row.savings_deposit),
            FinancialOutcome::NetSavings => row.net_savings,
            FinancialOutcome::LoanApplied => f64::from(u8::from(row.loan_applied)),
            FinancialOutcome::LoansReceived => ihs(row.loans_received),
            FinancialOutcome::LoanRepayments => ihs(row.loan_repayments),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvSpec {
    pub outcome: FinancialOutcome,
    pub lag: u32,
    pub absorb: Absorb,
    pub covariance: Covariance,
    pub weak_threshold: f64,
}

impl IvSpec {
    pub fn new(outcome: FinancialOutcome) -> Self {
        Self {
            outcome,
            lag: 1,
            absorb: Absorb::Individual,
            covariance: Covariance::Hc1,
            weak_threshold: WEAK_INSTRUMENT_F,
        }
    }
}

pub const EXPENDITURE_NAME: &str = "ihs_betting_expenditure";

/// Outcome at `t` on IHS betting expenditure at `t`, instrumented by
/// `share_correct` at `t − lag` with lagged ticket controls.
pub fn panel_two_sls(
    panel: &[PanelObservation],
    spec: &IvSpec,
) -> Result<RegressionResult, EstimationError> {
    if spec.lag == 0 {
        return Err(EstimationError::Specification("lag must be at least 1".into()));
    }
    let view = PanelView::new(panel)?;
    let mut design = Design::new(
        spec.outcome.label(),
        vec![
            EXPENDITURE_NAME.to_string(),
            share_lag_name(spec.lag),
            format!("tickets_midweek_lag{}", spec.lag),
            format!("tickets_weekend_lag{}", spec.lag),
        ],
    );
    for (row, prev) in lagged_sample(&view, spec.lag) {
        design.push(
            spec.outcome.value(row),
            &[
                ihs(row.betting_expenditure),
                prev.share_correct.unwrap_or_default(),
                prev.tickets_midweek as f64,
                prev.tickets_weekend as f64,
            ],
            row.individual_id,
            row.week,
        );
    }
    design.two_sls(1, spec.absorb, spec.covariance, spec.weak_threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneitySpec {
    pub lags: u32,
    pub covariance: Covariance,
}

impl HeterogeneitySpec {
    pub fn new(lags: u32) -> Self {
        Self {
            lags,
            covariance: Covariance::Hc1,
        }
    }
}

/// `share_correct` at `t` on its lags `1..=L` with week effects and no
/// individual effects. Rows need picks in `t` and each of the `L` weeks
/// before it; weeks with a prize at `t` are dropped.
pub fn heterogeneity_regression(
    panel: &[PanelObservation],
    spec: &HeterogeneitySpec,
) -> Result<RegressionResult, EstimationError> {
    if spec.lags == 0 {
        return Err(EstimationError::Specification("need at least one lag".into()));
    }
    let view = PanelView::new(panel)?;
    let rows = view.rows();
    let mut names: Vec<String> = (1..=spec.lags).map(share_lag_name).collect();
    names.push("tickets_midweek".into());
    names.push("tickets_weekend".into());
    let mut design = Design::new("share_correct", names);
    let mut x = Vec::with_capacity(spec.lags as usize + 2);
    'rows: for (i, row) in rows.iter().enumerate() {
        let Some(share) = row.share_correct else { continue };
        if row.won_prize {
            continue;
        }
        x.clear();
        for l in 1..=spec.lags {
            match view.shifted(i, -(l as i64)).and_then(|j| rows[j].share_correct) {
                Some(s) => x.push(s),
                None => continue 'rows,
            }
        }
        x.push(row.tickets_midweek as f64);
        x.push(row.tickets_weekend as f64);
        design.push(share, &x, row.individual_id, row.week);
    }
    design.ols(Absorb::Week, spec.covariance)
}
