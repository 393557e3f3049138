//! Individual-week panel rows and their CSV schema.
//!
//! Column order is fixed and matches the field order of [`PanelObservation`].
//! Booleans are written as `0`/`1`; `share_correct` is empty in weeks without
//! jackpot tickets. Monetary columns are KSH. Lines starting with `#` are
//! comments (run manifests) and skipped on read.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PANEL_COLUMNS: [&str; 17] = [
    "individual_id",
    "week",
    "tickets_midweek",
    "tickets_weekend",
    "picks_total",
    "picks_correct",
    "share_correct",
    "placed_jackpot",
    "betting_expenditure",
    "betting_income",
    "savings_deposit",
    "savings_withdrawal",
    "net_savings",
    "loan_applied",
    "loans_received",
    "loan_repayments",
    "won_prize",
];

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("panel is missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: column `{column}`: cannot parse {value:?}")]
    BadValue {
        line: u64,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: {message}")]
    Invariant { line: u64, message: String },
    #[error("panel rows must be sorted by (individual_id, week) without duplicates; row {0} is out of order")]
    Unsorted(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PanelObservation {
    pub individual_id: u64,
    pub week: u32,
    pub tickets_midweek: u32,
    pub tickets_weekend: u32,
    pub picks_total: u32,
    pub picks_correct: u32,
    pub share_correct: Option<f64>,
    pub placed_jackpot: bool,
    pub betting_expenditure: f64,
    pub betting_income: f64,
    pub savings_deposit: f64,
    pub savings_withdrawal: f64,
    pub net_savings: f64,
    pub loan_applied: bool,
    pub loans_received: f64,
    pub loan_repayments: f64,
    pub won_prize: bool,
}

impl PanelObservation {
    pub fn empty(individual_id: u64, week: u32) -> Self {
        Self {
            individual_id,
            week,
            ..Default::default()
        }
    }

    pub fn tickets(&self) -> u32 {
        self.tickets_midweek + self.tickets_weekend
    }

    /// Recompute the derived columns from the raw ones.
    pub fn finalize(&mut self) {
        self.picks_total = 13 * self.tickets_midweek + 17 * self.tickets_weekend;
        self.share_correct = if self.picks_total > 0 {
            Some(self.picks_correct as f64 / self.picks_total as f64)
        } else {
            None
        };
        self.placed_jackpot = self.tickets() > 0;
        self.net_savings = self.savings_deposit - self.savings_withdrawal;
    }

    pub fn check(&self) -> Result<(), String> {
        if self.picks_correct > self.picks_total {
            return Err(format!(
                "picks_correct {} exceeds picks_total {}",
                self.picks_correct, self.picks_total
            ));
        }
        if self.picks_total != 13 * self.tickets_midweek + 17 * self.tickets_weekend {
            return Err("picks_total must equal 13·tickets_midweek + 17·tickets_weekend".into());
        }
        if self.share_correct.is_some() != (self.picks_total > 0) {
            return Err("share_correct must be present exactly when picks_total > 0".into());
        }
        if self.won_prize && !(self.betting_income > 0.0) {
            return Err("won_prize requires positive betting_income".into());
        }
        Ok(())
    }
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Write rows with an optional block of `# key: value` comment lines first.
pub fn write_panel_csv<W: Write>(
    mut out: W,
    rows: &[PanelObservation],
    comments: &[String],
) -> Result<(), PanelError> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PANEL_COLUMNS)?;
    for r in rows {
        let share = r.share_correct.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([
            r.individual_id.to_string().as_str(),
            &r.week.to_string(),
            &r.tickets_midweek.to_string(),
            &r.tickets_weekend.to_string(),
            &r.picks_total.to_string(),
            &r.picks_correct.to_string(),
            &share,
            fmt_bool(r.placed_jackpot),
            &r.betting_expenditure.to_string(),
            &r.betting_income.to_string(),
            &r.savings_deposit.to_string(),
            &r.savings_withdrawal.to_string(),
            &r.net_savings.to_string(),
            fmt_bool(r.loan_applied),
            &r.loans_received.to_string(),
            &r.loan_repayments.to_string(),
            fmt_bool(r.won_prize),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a panel, validating the header and per-row invariants. Rows are sorted by
/// (individual_id, week).
pub fn read_panel_csv<R: Read>(input: R) -> Result<Vec<PanelObservation>, PanelError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let mut idx = [0usize; PANEL_COLUMNS.len()];
    for (slot, name) in idx.iter_mut().zip(PANEL_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| PanelError::MissingColumn(name.to_string()))?;
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |c: usize| record.get(idx[c]).unwrap_or("").trim();
        fn bad(line: u64, c: usize, v: &str) -> PanelError {
            PanelError::BadValue {
                line,
                column: PANEL_COLUMNS[c],
                value: v.to_string(),
            }
        }
        let int = |c: usize| -> Result<u64, PanelError> {
            field(c).parse::<u64>().map_err(|_| bad(line, c, field(c)))
        };
        let small = |c: usize| -> Result<u32, PanelError> {
            field(c).parse::<u32>().map_err(|_| bad(line, c, field(c)))
        };
        let real = |c: usize| -> Result<f64, PanelError> {
            match field(c).parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad(line, c, field(c))),
            }
        };
        let flag = |c: usize| -> Result<bool, PanelError> {
            match field(c) {
                "0" | "false" => Ok(false),
                "1" | "true" => Ok(true),
                other => Err(bad(line, c, other)),
            }
        };
        let share = match field(6) {
            "" => None,
            _ => Some(real(6)?),
        };
        let row = PanelObservation {
            individual_id: int(0)?,
            week: small(1)?,
            tickets_midweek: small(2)?,
            tickets_weekend: small(3)?,
            picks_total: small(4)?,
            picks_correct: small(5)?,
            share_correct: share,
            placed_jackpot: flag(7)?,
            betting_expenditure: real(8)?,
            betting_income: real(9)?,
            savings_deposit: real(10)?,
            savings_withdrawal: real(11)?,
            net_savings: real(12)?,
            loan_applied: flag(13)?,
            loans_received: real(14)?,
            loan_repayments: real(15)?,
            won_prize: flag(16)?,
        };
        row.check()
            .map_err(|message| PanelError::Invariant { line, message })?;
        rows.push(row);
    }
    rows.sort_by_key(|r| (r.individual_id, r.week));
    Ok(rows)
}

/// Lag and lead lookups over a panel sorted by (individual, week).
#[derive(Debug, Clone)]
pub struct PanelView<'a> {
    rows: &'a [PanelObservation],
    /// `(individual_id, start, end, dense)` for each individual's run of rows.
    spans: Vec<(u64, usize, usize, bool)>,
    slot_of_row: Vec<u32>,
}

impl<'a> PanelView<'a> {
    pub fn new(rows: &'a [PanelObservation]) -> Result<Self, PanelError> {
        let mut spans = Vec::new();
        let mut slot_of_row = Vec::with_capacity(rows.len());
        let mut start = 0;
        for i in 0..rows.len() {
            if i > 0 {
                let (a, b) = (&rows[i - 1], &rows[i]);
                if (a.individual_id, a.week) >= (b.individual_id, b.week) {
                    return Err(PanelError::Unsorted(i));
                }
                if a.individual_id != b.individual_id {
                    spans.push(Self::span(rows, start, i));
                    start = i;
                }
            }
            slot_of_row.push(spans.len() as u32);
        }
        if !rows.is_empty() {
            spans.push(Self::span(rows, start, rows.len()));
        }
        Ok(Self {
            rows,
            spans,
            slot_of_row,
        })
    }

    fn span(rows: &[PanelObservation], start: usize, end: usize) -> (u64, usize, usize, bool) {
        let dense = (rows[end - 1].week - rows[start].week) as usize == end - 1 - start;
        (rows[start].individual_id, start, end, dense)
    }

    pub fn rows(&self) -> &'a [PanelObservation] {
        self.rows
    }

    pub fn n_individuals(&self) -> usize {
        self.spans.len()
    }

    /// Row ranges, one per individual.
    pub fn individuals(&self) -> impl Iterator<Item = (u64, std::ops::Range<usize>)> + '_ {
        self.spans.iter().map(|&(id, s, e, _)| (id, s..e))
    }

    /// Index of the same individual's row `offset` weeks away from row `i`.
    pub fn shifted(&self, i: usize, offset: i64) -> Option<usize> {
        let (_, start, end, dense) = self.spans[self.slot_of_row[i] as usize];
        let target = self.rows[i].week as i64 + offset;
        if target < 0 {
            return None;
        }
        if dense {
            let j = i as i64 + offset;
            if j >= start as i64 && j < end as i64 {
                Some(j as usize)
            } else {
                None
            }
        } else {
            self.rows[start..end]
                .binary_search_by_key(&(target as u32), |r| r.week)
                .ok()
                .map(|k| start + k)
        }
    }
}
