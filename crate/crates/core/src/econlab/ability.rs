//! Per-gambler ability estimates with Clopper-Pearson intervals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::special::{beta_quantile, SpecialError};
use crate::jackpot::RANDOM_GUESS_ABILITY;
use crate::panel::PanelObservation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbilityError {
    #[error("no matches observed")]
    NoMatches,
    #[error("{successes} successes exceed {matches} matches")]
    TooManySuccesses { successes: u64, matches: u64 },
    #[error("confidence level {0} outside (0, 1)")]
    Level(f64),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbilityEstimate {
    pub successes: u64,
    pub matches: u64,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl AbilityEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn covers(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }

    pub fn disjoint(&self, other: &AbilityEstimate) -> bool {
        self.upper < other.lower || other.upper < self.lower
    }
}

/// Exact interval from Beta quantiles: `Beta(s, m−s+1)` at α/2 for the lower
/// bound and `Beta(s+1, m−s)` at 1−α/2 for the upper.
pub fn clopper_pearson(s: u64, m: u64, level: f64) -> Result<AbilityEstimate, AbilityError> {
    if m == 0 {
        return Err(AbilityError::NoMatches);
    }
    if s > m {
        return Err(AbilityError::TooManySuccesses {
            successes: s,
            matches: m,
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(AbilityError::Level(level));
    }
    let alpha = 1.0 - level;
    let (sf, mf) = (s as f64, m as f64);
    let point = sf / mf;
    let lower = if s == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, sf, mf - sf + 1.0)?.min(point)
    };
    let upper = if s == m {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, sf + 1.0, mf - sf)?.max(point)
    };
    Ok(AbilityEstimate {
        successes: s,
        matches: m,
        point,
        lower,
        upper,
        level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetHistory {
    pub individual_id: u64,
    pub successes: u64,
    pub matches: u64,
}

/// Total correct picks and total picks per individual.
pub fn bet_histories(panel: &[PanelObservation]) -> Vec<BetHistory> {
    let mut out: Vec<BetHistory> = Vec::new();
    for row in panel {
        match out.last_mut() {
            Some(h) if h.individual_id == row.individual_id => {
                h.successes += row.picks_correct as u64;
                h.matches += row.picks_total as u64;
            }
            _ => out.push(BetHistory {
                individual_id: row.individual_id,
                successes: row.picks_correct as u64,
                matches: row.picks_total as u64,
            }),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbilityRow {
    pub individual_id: u64,
    pub estimate: AbilityEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbilityTable {
    /// Sorted by number of matches, then id.
    pub rows: Vec<AbilityRow>,
    pub reference: f64,
    pub level: f64,
    pub share_point_above: f64,
    /// Share whose whole interval lies above the reference.
    pub share_interval_above: f64,
    pub share_interval_below: f64,
    pub share_excluding_reference: f64,
    /// At least two intervals are disjoint.
    pub heterogeneous: bool,
}

pub fn ability_table(
    histories: &[BetHistory],
    min_matches: u64,
    level: f64,
) -> Result<AbilityTable, AbilityError> {
    let reference = RANDOM_GUESS_ABILITY;
    let mut rows = Vec::new();
    for h in histories.iter().filter(|h| h.matches >= min_matches.max(1)) {
        rows.push(AbilityRow {
            individual_id: h.individual_id,
            estimate: clopper_pearson(h.successes, h.matches, level)?,
        });
    }
    rows.sort_by_key(|r| (r.estimate.matches, r.individual_id));
    let n = rows.len().max(1) as f64;
    let share = |f: &dyn Fn(&AbilityEstimate) -> bool| {
        rows.iter().filter(|r| f(&r.estimate)).count() as f64 / n
    };
    let share_point_above = share(&|e| e.point > reference);
    let share_interval_above = share(&|e| e.lower > reference);
    let share_interval_below = share(&|e| e.upper < reference);
    let max_lower = rows.iter().map(|r| r.estimate.lower).fold(f64::NEG_INFINITY, f64::max);
    let min_upper = rows.iter().map(|r| r.estimate.upper).fold(f64::INFINITY, f64::min);
    Ok(AbilityTable {
        heterogeneous: rows.len() > 1 && max_lower > min_upper,
        rows,
        reference,
        level,
        share_point_above,
        share_interval_above,
        share_interval_below,
        share_excluding_reference: share_interval_above + share_interval_below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// P(X ≥ s) for X ~ Bin(m, p), summed directly.
    fn upper_tail(s: u64, m: u64, p: f64) -> f64 {
        let mut total = 0.0;
        let mut coef = 1.0_f64; // C(m, k) built incrementally
        for k in 0..=m {
            if k > 0 {
                coef *= (m - k + 1) as f64 / k as f64;
            }
            if k >= s {
                total += coef * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
            }
        }
        total
    }

    fn bisect(f: impl Fn(f64) -> f64, target: f64) -> f64 {
        // f increasing in p
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn edges() {
        let e = clopper_pearson(0, 20, 0.95).unwrap();
        assert_eq!(e.lower, 0.0);
        let e = clopper_pearson(20, 20, 0.95).unwrap();
        assert_eq!(e.upper, 1.0);
        assert!(clopper_pearson(0, 0, 0.95).is_err());
        assert!(clopper_pearson(3, 2, 0.95).is_err());
    }

    #[test]
    fn matches_tail_bisection_at_33_of_100() {
        let e = clopper_pearson(33, 100, 0.95).unwrap();
        let lower = bisect(|p| upper_tail(33, 100, p), 0.025);
        let upper = bisect(|p| upper_tail(34, 100, p), 0.975);
        assert!((e.lower - lower).abs() < 1e-9, "{} vs {lower}", e.lower);
        assert!((e.upper - upper).abs() < 1e-9, "{} vs {upper}", e.upper);
    }

    #[test]
    fn narrow_for_large_histories() {
        let e = clopper_pearson(565, 1129, 0.95).unwrap();
        assert!(e.width() < 0.06, "{}", e.width());
    }

    #[test]
    fn table_flags_disjoint_intervals() {
        let h = [
            BetHistory { individual_id: 1, successes: 100, matches: 1000 },
            BetHistory { individual_id: 2, successes: 600, matches: 1000 },
            BetHistory { individual_id: 3, successes: 5, matches: 10 },
        ];
        let t = ability_table(&h, 500, 0.95).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.heterogeneous);
        assert_eq!(t.share_point_above, 0.5);
        assert_eq!(t.share_interval_below, 0.5);
        let t = ability_table(&h[..1], 1, 0.95).unwrap();
        assert!(!t.heterogeneous);
    }
}
