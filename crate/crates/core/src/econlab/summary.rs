//! Descriptive statistics by gambler status.

use serde::{Deserialize, Serialize};

use crate::panel::PanelObservation;

/// Individuals observed for fewer weeks than this are left out.
pub const MIN_WEEKS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub mean: f64,
    pub p25: f64,
    pub p75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub individuals: usize,
    pub betting_expenditure: Distribution,
    pub betting_income: Distribution,
}

/// Linear interpolation between order statistics (R's default, type 7).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn distribution(mut v: Vec<f64>) -> Distribution {
    v.sort_by(f64::total_cmp);
    let mean = if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    };
    Distribution {
        mean,
        p25: quantile(&v, 0.25),
        p75: quantile(&v, 0.75),
    }
}

/// Weekly betting expenditure and income for gamblers (any betting flow),
/// non-gamblers and everyone, over individual-weeks.
pub fn descriptive_statistics(panel: &[PanelObservation]) -> Vec<GroupSummary> {
    let mut groups: [(Vec<f64>, Vec<f64>, usize); 3] = Default::default();
    let mut start = 0;
    while start < panel.len() {
        let id = panel[start].individual_id;
        let end = panel[start..]
            .iter()
            .position(|r| r.individual_id != id)
            .map_or(panel.len(), |k| start + k);
        let rows = &panel[start..end];
        start = end;
        if rows.len() < MIN_WEEKS {
            continue;
        }
        let gambler = rows
            .iter()
            .any(|r| r.betting_expenditure > 0.0 || r.betting_income > 0.0);
        for g in [if gambler { 0 } else { 1 }, 2] {
            let (exp, inc, n) = &mut groups[g];
            *n += 1;
            exp.extend(rows.iter().map(|r| r.betting_expenditure));
            inc.extend(rows.iter().map(|r| r.betting_income));
        }
    }
    ["Gamblers", "Non-gamblers", "Full sample"]
        .into_iter()
        .zip(groups)
        .map(|(name, (exp, inc, n))| GroupSummary {
            group: name.to_string(),
            individuals: n,
            betting_expenditure: distribution(exp),
            betting_income: distribution(inc),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert_eq!(quantile(&[5.0], 0.25), 5.0);
    }

    #[test]
    fn groups_split_on_any_betting_flow() {
        let mut panel = Vec::new();
        for (id, spend) in [(1u64, 10.0), (2, 0.0)] {
            for w in 0..4 {
                let mut r = PanelObservation::empty(id, w);
                r.betting_expenditure = spend * w as f64;
                panel.push(r);
            }
        }
        panel.push(PanelObservation::empty(3, 0));
        let s = descriptive_statistics(&panel);
        assert_eq!(s[0].individuals, 1);
        assert_eq!(s[1].individuals, 1);
        assert_eq!(s[2].individuals, 2);
        assert_eq!(s[0].betting_expenditure.mean, 15.0);
        assert_eq!(s[1].betting_expenditure.p75, 0.0);
        assert_eq!(s[2].betting_expenditure.mean, 7.5);
    }
}
