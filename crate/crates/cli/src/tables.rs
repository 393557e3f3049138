//! One builder per published analysis.

use std::fmt::Write as _;

use betlearn::econlab::ability::{bet_histories, AbilityTable};
use betlearn::econlab::feedback::{feedback_regression, FeedbackMode, FeedbackSpec, NEGATIVE, POSITIVE, SYMMETRY_TEST};
use betlearn::econlab::regressions::{share_lag_name, EXPENDITURE_NAME};
use betlearn::econlab::summary::descriptive_statistics;
use betlearn::econlab::{
    ability_table, heterogeneity_regression, learning_regression, panel_two_sls, Absorb, Covariance,
    FinancialOutcome, HeterogeneitySpec, IvSpec, LearningDependent, LearningSpec, RegressionResult,
};
use betlearn::panel::PanelObservation;

use crate::report::{Cell, Row, Table};
use crate::{CliError, TableKind};

pub const CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    pub cutoff: f64,
    pub mode: FeedbackMode,
    pub covariance: Covariance,
    pub min_matches: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            cutoff: 0.10,
            mode: FeedbackMode::Relative,
            covariance: Covariance::Hc1,
            min_matches: 500,
        }
    }
}

impl TableOptions {
    /// Options that affect a given table, for its header.
    pub fn describe(&self, kind: TableKind) -> Vec<(String, String)> {
        let cov = match self.covariance {
            Covariance::Hc1 => "hc1",
            Covariance::ClusterIndividual => "cluster",
        };
        let mut out = Vec::new();
        match kind {
            TableKind::Table3 | TableKind::TableA5 => {
                out.push(("cutoff".into(), self.cutoff.to_string()));
                out.push(("mode".into(), self.mode.to_string()));
            }
            TableKind::TableA3 | TableKind::TableA4 => out.push(("mode".into(), self.mode.to_string())),
            TableKind::Figure1 => {
                out.push(("min_matches".into(), self.min_matches.to_string()));
                out.push(("level".into(), CI_LEVEL.to_string()));
                return out;
            }
            TableKind::TableA1 => return out,
            _ => {}
        }
        out.push(("covariance".into(), cov.into()));
        out
    }
}

pub struct Built {
    pub table: Table,
    /// Per-gambler estimates behind figure1.
    pub points: Option<AbilityTable>,
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn fe_rows(results: &[&RegressionResult]) -> Vec<Row> {
    vec![
        Row::new(
            "Individual fixed effects",
            "individual_fixed_effects",
            results.iter().map(|r| Cell::Flag(r.individual_effects)).collect(),
        ),
        Row::new(
            "Week fixed effects",
            "week_fixed_effects",
            results.iter().map(|r| Cell::Flag(r.week_effects)).collect(),
        ),
    ]
}

fn count_rows(results: &[&RegressionResult]) -> Vec<Row> {
    vec![
        Row::new("Individuals", "individuals", results.iter().map(|r| Cell::Count(r.n_individuals)).collect()),
        Row::new("Weeks", "weeks", results.iter().map(|r| Cell::Count(r.n_weeks)).collect()),
        Row::new("Observations", "observations", results.iter().map(|r| Cell::Count(r.n_obs)).collect()),
    ]
}

/// Coefficient, bracketed SE and optionally the CI for one regressor.
fn coef_rows(label: &str, key: &str, name: &str, results: &[&RegressionResult], ci: bool) -> Vec<Row> {
    let cell = |f: &dyn Fn(&RegressionResult) -> Cell| {
        results
            .iter()
            .map(|r| if r.position(name).is_some() { f(r) } else { Cell::Empty })
            .collect::<Vec<_>>()
    };
    let mut rows = vec![
        Row::new(label, key, cell(&|r| Cell::Value(r.coef(name)))),
        Row::new("", format!("{key}_se"), cell(&|r| Cell::Se(r.se(name)))),
    ];
    if ci {
        rows.push(Row::new(
            "",
            key,
            cell(&|r| {
                let (lo, hi) = r.confidence_interval(name, CI_LEVEL);
                Cell::Range(lo, hi)
            }),
        ));
    }
    rows
}

fn table2(panel: &[PanelObservation], o: &TableOptions) -> Result<Table, CliError> {
    let fit = |d| {
        let mut spec = LearningSpec::new(d);
        spec.covariance = o.covariance;
        learning_regression(panel, &spec)
    };
    let placed = fit(LearningDependent::PlacedJackpot)?;
    let spend = fit(LearningDependent::IhsExpenditure)?;
    let rs = [&placed, &spend];
    let share = share_lag_name(1);
    let mut rows = coef_rows("Share correct in week t-1", "share_correct_lag1", &share, &rs, true);
    rows.push(Row::new(
        "One-sd effect (pp / %)",
        "effect_one_sd",
        rs.iter().map(|r| Cell::Value(r.statistic("effect_one_sd").unwrap_or(f64::NAN))).collect(),
    ));
    rows.extend(fe_rows(&rs));
    rows.extend(count_rows(&rs));
    Ok(Table {
        id: "table2".into(),
        title: "Response to previous week's betting results".into(),
        columns: strs(&["Placed jackpot bet", "Betting expenditure"]),
        column_keys: strs(&["placed_jackpot", "ihs_betting_expenditure"]),
        rows,
        notes: vec![
            "Notes: controls for midweek and weekend jackpot tickets in week t-1. Excludes individual-weeks \
             after a week with a jackpot prize. Robust standard errors in round brackets, 95% confidence \
             intervals in square brackets. Betting expenditure is the inverse hyperbolic sine of transfers \
             to the betting company."
                .into(),
        ],
        decimals: 3,
    })
}

fn feedback_table(
    panel: &[PanelObservation],
    o: &TableOptions,
    id: &str,
    title: &str,
    cutoff: f64,
    absorb: Absorb,
) -> Result<Table, CliError> {
    let results = (1..=4)
        .map(|horizon| {
            feedback_regression(
                panel,
                &FeedbackSpec {
                    horizon,
                    cutoff,
                    mode: o.mode,
                    restrict: true,
                    absorb,
                    covariance: o.covariance,
                },
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rs: Vec<&RegressionResult> = results.iter().collect();
    let mut rows = coef_rows("Positive feedback (b_p)", "positive_feedback", POSITIVE, &rs, false);
    rows.extend(coef_rows("Negative feedback (b_n)", "negative_feedback", NEGATIVE, &rs, false));
    rows.push(Row::new(
        "P-value |b_p| = |b_n|",
        "p_value_symmetry",
        rs.iter()
            .map(|r| Cell::Value(r.wald_test(SYMMETRY_TEST).map_or(f64::NAN, |w| w.p_value)))
            .collect(),
    ));
    rows.extend(fe_rows(&rs));
    rows.extend(count_rows(&rs));
    rows.push(Row::new(
        "Dropped (not in all buckets)",
        "individuals_dropped",
        rs.iter()
            .map(|r| Cell::Count(r.statistic("individuals_dropped").unwrap_or(0.0) as usize))
            .collect(),
    ));
    let rule = match o.mode {
        FeedbackMode::Relative => format!("more than {}% above (below) their own mean share", (cutoff * 1e8).round() / 1e6),
        FeedbackMode::Absolute => format!("more than {cutoff} above (below) their own mean share"),
    };
    Ok(Table {
        id: id.into(),
        title: title.into(),
        columns: strs(&["t+1", "t+2", "t+3", "t+4"]),
        column_keys: strs(&["lead1", "lead2", "lead3", "lead4"]),
        rows,
        notes: vec![format!(
            "Notes: dependent variable is placing a jackpot bet in the given week. Positive (negative) \
             feedback is a week-t share of correct predictions {rule}. Gamblers without a week in each of \
             the three categories are dropped. Controls for week-t midweek and weekend tickets; excludes \
             weeks t with a jackpot prize. Robust standard errors in round brackets."
        )],
        decimals: 3,
    })
}

fn table4(panel: &[PanelObservation], o: &TableOptions) -> Result<Table, CliError> {
    let results = FinancialOutcome::ALL
        .iter()
        .map(|&outcome| {
            let mut spec = IvSpec::new(outcome);
            spec.covariance = o.covariance;
            panel_two_sls(panel, &spec)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rs: Vec<&RegressionResult> = results.iter().collect();
    let mut rows = vec![Row::new(
        "Units",
        "units",
        FinancialOutcome::ALL.iter().map(|f| Cell::Text(f.units().into())).collect(),
    )];
    rows.extend(coef_rows("Betting expenditure", "betting_expenditure", EXPENDITURE_NAME, &rs, true));
    rows.push(Row::new(
        "First-stage partial F",
        "partial_f",
        rs.iter().map(|r| Cell::Value(r.partial_f.unwrap_or(f64::NAN))).collect(),
    ));
    rows.push(Row::new(
        "Weak instrument",
        "weak_instrument",
        rs.iter().map(|r| Cell::Flag(r.weak_instrument)).collect(),
    ));
    rows.extend(fe_rows(&rs));
    rows.extend(count_rows(&rs));
    Ok(Table {
        id: "table4".into(),
        title: "Instrumental variables estimates of the impact of increased betting expenditure".into(),
        columns: FinancialOutcome::ALL.iter().map(|f| f.label().replace('_', " ")).collect(),
        column_keys: FinancialOutcome::ALL.iter().map(|f| f.label().to_string()).collect(),
        rows,
        notes: vec![
            "Notes: regressor is the inverse hyperbolic sine of betting expenditure, instrumented with the \
             previous week's share of correct jackpot predictions. Elasticity outcomes are inverse \
             hyperbolic sines; net savings deposit is in KSH; applied for loan is an indicator. Controls for \
             previous-week midweek and weekend tickets; excludes weeks after a jackpot prize. Robust standard \
             errors in round brackets, 95% confidence intervals in square brackets."
                .into(),
        ],
        decimals: 3,
    })
}

fn table_a1(panel: &[PanelObservation]) -> Table {
    let groups = descriptive_statistics(panel);
    let mut rows = vec![Row::new(
        "Number of individuals",
        "individuals",
        groups.iter().map(|g| Cell::Count(g.individuals)).collect(),
    )];
    for (label, key, pick) in [
        (
            "Betting expenditure (weekly)",
            "betting_expenditure",
            (|g: &betlearn::econlab::summary::GroupSummary| g.betting_expenditure) as fn(&_) -> _,
        ),
        ("Betting income (weekly)", "betting_income", |g| g.betting_income),
    ] {
        rows.push(Row::new(label, format!("{key}_mean"), groups.iter().map(|g| Cell::Value(pick(g).mean)).collect()));
        rows.push(
            Row::new("", key, groups.iter().map(|g| Cell::Range(pick(g).p25, pick(g).p75)).collect())
                .with_range_names("p25", "p75"),
        );
    }
    Table {
        id: "tableA1".into(),
        title: "Descriptive statistics".into(),
        columns: groups.iter().map(|g| g.group.clone()).collect(),
        column_keys: strs(&["gamblers", "non_gamblers", "full_sample"]),
        rows,
        notes: vec![
            "Notes: means over individual-weeks with 25th and 75th percentiles in brackets. Gamblers have at \
             least one transfer to or from the betting company. Individuals observed for fewer than three \
             weeks are excluded. Amounts in KSH."
                .into(),
        ],
        decimals: 2,
    }
}

fn table_a2(panel: &[PanelObservation], o: &TableOptions) -> Result<Table, CliError> {
    let results = (1..=4)
        .map(|lags| {
            let mut spec = HeterogeneitySpec::new(lags);
            spec.covariance = o.covariance;
            heterogeneity_regression(panel, &spec)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rs: Vec<&RegressionResult> = results.iter().collect();
    let mut rows = Vec::new();
    for l in 1..=4u32 {
        rows.extend(coef_rows(&format!("Share correct in week t-{l}"), &share_lag_name(l), &share_lag_name(l), &rs, false));
    }
    rows.extend(fe_rows(&rs));
    rows.extend(count_rows(&rs));
    Ok(Table {
        id: "tableA2".into(),
        title: "Testing for heterogeneity in betting ability".into(),
        columns: strs(&["(1)", "(2)", "(3)", "(4)"]),
        column_keys: strs(&["lags1", "lags2", "lags3", "lags4"]),
        rows,
        notes: vec![
            "Notes: dependent variable is the share of correct predictions in week t. Controls for week-t \
             midweek and weekend tickets; excludes weeks with a jackpot prize. Robust standard errors in \
             round brackets."
                .into(),
        ],
        decimals: 3,
    })
}

fn figure1(panel: &[PanelObservation], o: &TableOptions) -> Result<Built, CliError> {
    let t = ability_table(&bet_histories(panel), o.min_matches, CI_LEVEL)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let rows = vec![
        Row::new("Gamblers", "gamblers", vec![Cell::Count(t.rows.len())]),
        Row::new("Reference ability", "reference", vec![Cell::Value(t.reference)]),
        Row::new("Point estimate above reference", "share_point_above", vec![Cell::Value(t.share_point_above)]),
        Row::new("Interval above reference", "share_interval_above", vec![Cell::Value(t.share_interval_above)]),
        Row::new("Interval below reference", "share_interval_below", vec![Cell::Value(t.share_interval_below)]),
        Row::new("Interval excludes reference", "share_excluding_reference", vec![Cell::Value(t.share_excluding_reference)]),
        Row::new("Disjoint intervals", "heterogeneous", vec![Cell::Flag(t.heterogeneous)]),
    ];
    Ok(Built {
        table: Table {
            id: "figure1".into(),
            title: "Estimates of betting ability for frequent gamblers".into(),
            columns: strs(&["Value"]),
            column_keys: strs(&["value"]),
            rows,
            notes: vec![format!(
                "Notes: gamblers with at least {} jackpot predictions. Shares are fractions of those gamblers. \
                 Clopper-Pearson {}% intervals; per-gambler estimates in figure1_points.csv.",
                o.min_matches,
                CI_LEVEL * 100.0
            )],
            decimals: 3,
        },
        points: Some(t),
    })
}

/// Per-gambler estimates sorted by number of predictions.
pub fn figure1_points_csv(t: &AbilityTable, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str("rank,individual_id,successes,matches,point,lower,upper,reference\n");
    for (i, r) in t.rows.iter().enumerate() {
        let e = &r.estimate;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            i + 1,
            r.individual_id,
            e.successes,
            e.matches,
            e.point,
            e.lower,
            e.upper,
            t.reference
        );
    }
    out
}

pub fn build(kind: TableKind, panel: &[PanelObservation], o: &TableOptions) -> Result<Built, CliError> {
    let plain = |table| Ok(Built { table, points: None });
    match kind {
        TableKind::Table2 => plain(table2(panel, o)?),
        TableKind::Table3 => plain(feedback_table(
            panel,
            o,
            "table3",
            "Response to positive and negative feedback",
            o.cutoff,
            Absorb::Individual,
        )?),
        TableKind::Table4 => plain(table4(panel, o)?),
        TableKind::TableA1 => plain(table_a1(panel)),
        TableKind::TableA2 => plain(table_a2(panel, o)?),
        TableKind::TableA3 => plain(feedback_table(
            panel,
            o,
            "tableA3",
            "Response to positive and negative feedback with a 5% cutoff",
            0.05,
            Absorb::Individual,
        )?),
        TableKind::TableA4 => plain(feedback_table(
            panel,
            o,
            "tableA4",
            "Response to positive and negative feedback with a 15% cutoff",
            0.15,
            Absorb::Individual,
        )?),
        TableKind::TableA5 => plain(feedback_table(
            panel,
            o,
            "tableA5",
            "Response to positive and negative feedback with time fixed effects",
            o.cutoff,
            Absorb::IndividualAndWeek,
        )?),
        TableKind::Figure1 => figure1(panel, o),
        TableKind::All => Err(CliError::Usage("`all` is expanded before building".into())),
    }
}
