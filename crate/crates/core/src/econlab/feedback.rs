//! Positive, negative and base feedback weeks relative to each gambler's own
//! mean share of correct picks, and the symmetry regression on them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ols::{Covariance, RegressionResult};
use super::regressions::{Absorb, Design};
use super::EstimationError;
use crate::panel::{PanelObservation, PanelView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// Thresholds at `mean · (1 ± cutoff)`.
    #[default]
    Relative,
    /// Thresholds at `mean ± cutoff`.
    Absolute,
}

impl FromStr for FeedbackMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relative" => Ok(FeedbackMode::Relative),
            "absolute" => Ok(FeedbackMode::Absolute),
            other => Err(format!("unknown feedback mode `{other}` (expected relative or absolute)")),
        }
    }
}

impl fmt::Display for FeedbackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeedbackMode::Relative => "relative",
            FeedbackMode::Absolute => "absolute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackCategory {
    Positive,
    Negative,
    Base,
}

/// Strict on both sides: a share exactly on a threshold is base.
pub fn classify(share: f64, mean: f64, cutoff: f64, mode: FeedbackMode) -> FeedbackCategory {
    let (hi, lo) = match mode {
        FeedbackMode::Relative => (mean * (1.0 + cutoff), mean * (1.0 - cutoff)),
        FeedbackMode::Absolute => (mean + cutoff, mean - cutoff),
    };
    if share > hi {
        FeedbackCategory::Positive
    } else if share < lo {
        FeedbackCategory::Negative
    } else {
        FeedbackCategory::Base
    }
}

/// Categories aligned with the rows of the panel they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorized {
    pub cutoff: f64,
    pub mode: FeedbackMode,
    pub categories: Vec<Option<FeedbackCategory>>,
    /// Individuals removed by [`restrict_all_buckets`].
    pub dropped: BTreeSet<u64>,
}

impl Categorized {
    /// Individuals with at least one week in every category.
    pub fn all_bucket_individuals(&self, panel: &[PanelObservation]) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        let mut seen = [false; 3];
        for (i, row) in panel.iter().enumerate() {
            if i == 0 || panel[i - 1].individual_id != row.individual_id {
                seen = [false; 3];
            }
            if let Some(c) = self.categories[i] {
                seen[c as usize] = true;
                if seen.iter().all(|&s| s) {
                    out.insert(row.individual_id);
                }
            }
        }
        out
    }
}

/// Assign a category to every week with picks; the mean is taken over that
/// individual's weeks with picks. Weeks without picks get `None`.
pub fn categorize_feedback(
    panel: &[PanelObservation],
    cutoff: f64,
    mode: FeedbackMode,
) -> Result<Categorized, EstimationError> {
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(EstimationError::Specification(format!("invalid cutoff {cutoff}")));
    }
    let view = PanelView::new(panel)?;
    let mut categories = vec![None; panel.len()];
    for (_, range) in view.individuals() {
        let shares: Vec<f64> = panel[range.clone()].iter().filter_map(|r| r.share_correct).collect();
        if shares.is_empty() {
            continue;
        }
        let mean = shares.iter().sum::<f64>() / shares.len() as f64;
        for i in range {
            categories[i] = panel[i].share_correct.map(|s| classify(s, mean, cutoff, mode));
        }
    }
    Ok(Categorized {
        cutoff,
        mode,
        categories,
        dropped: BTreeSet::new(),
    })
}

/// Keep only individuals observed in all three categories; the rows of
/// everyone else lose their category and so leave any feedback sample.
pub fn restrict_all_buckets(panel: &[PanelObservation], categorized: &Categorized) -> Categorized {
    let keep = categorized.all_bucket_individuals(panel);
    let mut out = categorized.clone();
    for (row, cat) in panel.iter().zip(out.categories.iter_mut()) {
        if !keep.contains(&row.individual_id) {
            if cat.is_some() {
                out.dropped.insert(row.individual_id);
            }
            *cat = None;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackSpec {
    /// Weeks ahead of the feedback week, 1 to 4.
    pub horizon: u32,
    pub cutoff: f64,
    pub mode: FeedbackMode,
    pub restrict: bool,
    pub absorb: Absorb,
    pub covariance: Covariance,
}

impl Default for FeedbackSpec {
    fn default() -> Self {
        Self {
            horizon: 1,
            cutoff: 0.10,
            mode: FeedbackMode::Relative,
            restrict: true,
            absorb: Absorb::Individual,
            covariance: Covariance::Hc1,
        }
    }
}

pub const POSITIVE: &str = "positive_feedback";
pub const NEGATIVE: &str = "negative_feedback";
pub const SYMMETRY_TEST: &str = "|b_p|=|b_n|";

/// `placed_jackpot` at `t + τ` on positive and negative indicators at `t`
/// with week-`t` ticket controls, excluding weeks `t` with a prize. Reports
/// the Wald test of `β_p + β_n = 0`.
pub fn feedback_regression(
    panel: &[PanelObservation],
    spec: &FeedbackSpec,
) -> Result<RegressionResult, EstimationError> {
    if !(1..=4).contains(&spec.horizon) {
        return Err(EstimationError::Specification(format!(
            "horizon {} outside 1..=4",
            spec.horizon
        )));
    }
    let view = PanelView::new(panel)?;
    let mut categorized = categorize_feedback(panel, spec.cutoff, spec.mode)?;
    if spec.restrict {
        categorized = restrict_all_buckets(panel, &categorized);
    }
    let mut design = Design::new(
        format!("placed_jackpot_lead{}", spec.horizon),
        vec![
            POSITIVE.into(),
            NEGATIVE.into(),
            "tickets_midweek".into(),
            "tickets_weekend".into(),
        ],
    );
    for (i, row) in panel.iter().enumerate() {
        let Some(cat) = categorized.categories[i] else { continue };
        if row.won_prize {
            continue;
        }
        let Some(j) = view.shifted(i, spec.horizon as i64) else { continue };
        design.push(
            f64::from(u8::from(panel[j].placed_jackpot)),
            &[
                f64::from(u8::from(cat == FeedbackCategory::Positive)),
                f64::from(u8::from(cat == FeedbackCategory::Negative)),
                row.tickets_midweek as f64,
                row.tickets_weekend as f64,
            ],
            row.individual_id,
            row.week,
        );
    }
    let mut r = design.ols(spec.absorb, spec.covariance)?;
    let wald = r.linear_wald(SYMMETRY_TEST, &[(POSITIVE, 1.0), (NEGATIVE, 1.0)], 0.0)?;
    r.wald.push(wald);
    r.statistics
        .push(("individuals_dropped".into(), categorized.dropped.len() as f64));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(shares: &[(u64, u32, Option<u32>)]) -> Vec<PanelObservation> {
        shares
            .iter()
            .map(|&(id, week, correct)| {
                let mut r = PanelObservation::empty(id, week);
                if let Some(c) = correct {
                    r.tickets_weekend = 1;
                    r.picks_correct = c;
                }
                r.finalize();
                r
            })
            .collect()
    }

    #[test]
    fn thresholds() {
        use FeedbackCategory::*;
        use FeedbackMode::*;
        assert_eq!(classify(0.34, 0.30, 0.10, Relative), Positive);
        assert_eq!(classify(0.30 * 1.1, 0.30, 0.10, Relative), Base);
        assert_eq!(classify(0.30 * 0.9, 0.30, 0.10, Relative), Base);
        assert_eq!(classify(0.26, 0.30, 0.10, Relative), Negative);
        assert_eq!(classify(0.39, 0.30, 0.10, Absolute), Base);
        assert_eq!(classify(0.41, 0.30, 0.10, Absolute), Positive);
        assert_eq!("absolute".parse::<FeedbackMode>().unwrap(), Absolute);
        assert!("other".parse::<FeedbackMode>().is_err());
    }

    #[test]
    fn constant_shares_are_all_base() {
        let p = rows(&[(1, 0, Some(5)), (1, 1, Some(5)), (1, 2, Some(5))]);
        let c = categorize_feedback(&p, 0.10, FeedbackMode::Relative).unwrap();
        assert!(c.categories.iter().all(|&x| x == Some(FeedbackCategory::Base)));
        assert!(restrict_all_buckets(&p, &c).categories.iter().all(Option::is_none));
    }

    #[test]
    fn spread_shares_fill_every_bucket() {
        // mean 6/17; weeks at half, equal and one and a half times it
        let p = rows(&[(1, 0, Some(3)), (1, 1, Some(6)), (1, 2, Some(9)), (2, 0, Some(4)), (2, 1, None)]);
        let c = categorize_feedback(&p, 0.10, FeedbackMode::Relative).unwrap();
        assert_eq!(c.categories[4], None);
        let keep = c.all_bucket_individuals(&p);
        assert_eq!(keep.into_iter().collect::<Vec<_>>(), vec![1]);
        let r = restrict_all_buckets(&p, &c);
        assert_eq!(r.dropped.iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(r.categories[3], None);
        assert_eq!(r.categories[0], Some(FeedbackCategory::Negative));
    }

    #[test]
    fn bad_horizon_is_rejected() {
        let p = rows(&[(1, 0, Some(3))]);
        let spec = FeedbackSpec {
            horizon: 5,
            ..FeedbackSpec::default()
        };
        assert!(feedback_regression(&p, &spec).is_err());
    }
}
