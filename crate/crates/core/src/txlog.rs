//! Bet confirmation messages, mobile-money ledger records and their
//! aggregation into the individual-week panel.
//!
//! Panel weeks are ISO weeks counted from a Monday start date. Both jackpots
//! of a panel week resolve inside it: midweek on Wednesday, weekend on Sunday.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jackpot::{JackpotKind, Outcome};
use crate::panel::PanelObservation;

pub const DEFAULT_SUFFIX: &str = "Games resulted on full time.";
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

const PREFIX: &str = "You've placed Jackpot BetID ";
const STAKE_INTRO: &str = " for KSH ";
const BALANCE_INTRO: &str = ". S-Pesa available balance KSH ";

/// Why a line is not a valid bet message.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Error)]
pub enum MessageError {
    #[error("not a jackpot bet message")]
    NotBetMessage,
    #[error("malformed picks token {0:?}")]
    MalformedPicks(String),
    #[error("{0} picks; a jackpot has 13 or 17")]
    PickCount(usize),
    #[error("unparseable amount {0:?}")]
    BadAmount(String),
}

impl MessageError {
    pub fn kind(&self) -> &'static str {
        match self {
            MessageError::NotBetMessage => "not_bet_message",
            MessageError::MalformedPicks(_) => "malformed_picks",
            MessageError::PickCount(_) => "pick_count",
            MessageError::BadAmount(_) => "bad_amount",
        }
    }
}

#[derive(Debug, Error)]
pub enum TxlogError {
    #[error("timestamp {0} lies outside the calendar")]
    OutsideCalendar(NaiveDateTime),
    #[error("calendar: {0}")]
    Calendar(String),
    #[error("ledger line {line}: {message}")]
    Ledger { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetMessage {
    pub bet_id: String,
    pub picks: Vec<Outcome>,
    pub stake: u64,
    pub balance: u64,
    /// Text after the balance clause, kept verbatim.
    pub suffix: String,
}

impl BetMessage {
    pub fn new(bet_id: impl Into<String>, picks: Vec<Outcome>, stake: u64, balance: u64) -> Self {
        Self {
            bet_id: bet_id.into(),
            picks,
            stake,
            balance,
            suffix: DEFAULT_SUFFIX.to_string(),
        }
    }

    pub fn kind(&self) -> Option<JackpotKind> {
        JackpotKind::from_n_matches(self.picks.len())
    }
}

fn picks_token(picks: &[Outcome]) -> String {
    let mut s = String::with_capacity(2 * picks.len());
    for (i, p) in picks.iter().enumerate() {
        if i > 0 {
            s.push('#');
        }
        s.push(p.symbol());
    }
    s
}

pub fn format_bet_message(bet: &BetMessage) -> String {
    let mut s = format!(
        "{PREFIX}{} {}{STAKE_INTRO}{}{BALANCE_INTRO}{}.",
        bet.bet_id,
        picks_token(&bet.picks),
        bet.stake,
        bet.balance
    );
    if !bet.suffix.is_empty() {
        s.push(' ');
        s.push_str(&bet.suffix);
    }
    s
}

fn parse_amount(token: &str) -> Result<u64, MessageError> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(MessageError::BadAmount(token.to_string()));
    }
    token
        .parse()
        .map_err(|_| MessageError::BadAmount(token.to_string()))
}

pub fn parse_bet_message(line: &str) -> Result<BetMessage, MessageError> {
    let rest = line.strip_prefix(PREFIX).ok_or(MessageError::NotBetMessage)?;
    let (bet_id, rest) = rest.split_once(' ').ok_or(MessageError::NotBetMessage)?;
    if bet_id.is_empty() || !bet_id.bytes().all(|b| b.is_ascii_alphanumeric()) {
        return Err(MessageError::NotBetMessage);
    }
    let (picks_raw, rest) = rest
        .split_once(STAKE_INTRO)
        .ok_or(MessageError::NotBetMessage)?;
    let picks = picks_raw
        .split('#')
        .map(|p| {
            let mut chars = p.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Outcome::from_symbol(c),
                _ => None,
            }
            .ok_or_else(|| MessageError::MalformedPicks(p.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if JackpotKind::from_n_matches(picks.len()).is_none() {
        return Err(MessageError::PickCount(picks.len()));
    }
    let (stake_raw, rest) = rest
        .split_once(BALANCE_INTRO)
        .ok_or(MessageError::NotBetMessage)?;
    let stake = parse_amount(stake_raw)?;
    if stake == 0 {
        return Err(MessageError::BadAmount(stake_raw.to_string()));
    }
    let (balance_token, suffix) = match rest.split_once(' ') {
        Some((b, s)) => (b, s),
        None => (rest, ""),
    };
    let balance_raw = balance_token
        .strip_suffix('.')
        .ok_or_else(|| MessageError::BadAmount(balance_token.to_string()))?;
    let balance = parse_amount(balance_raw)?;
    Ok(BetMessage {
        bet_id: bet_id.to_string(),
        picks,
        stake,
        balance,
        suffix: suffix.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Money into the individual's wallet.
    Credit,
    /// Money out of the wallet.
    Debit,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Credit => "credit",
            Direction::Debit => "debit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Betting,
    Savings,
    Loan,
    Other,
}

/// Counterparty name to category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompanyTable(pub BTreeMap<String, Category>);

pub const BETTING_COMPANY: &str = "SportPesa";
pub const SAVINGS_COMPANY: &str = "M-Shwari";
pub const LENDERS: [&str; 6] = ["M-Shwari Loan", "Tala", "Branch", "KCB", "Equity Bank", "Co-op Bank"];

impl Default for CompanyTable {
    fn default() -> Self {
        let mut m = BTreeMap::new();
        m.insert(BETTING_COMPANY.to_string(), Category::Betting);
        m.insert(SAVINGS_COMPANY.to_string(), Category::Savings);
        for lender in LENDERS {
            m.insert(lender.to_string(), Category::Loan);
        }
        CompanyTable(m)
    }
}

impl CompanyTable {
    pub fn category(&self, counterparty: &str) -> Category {
        self.0.get(counterparty).copied().unwrap_or(Category::Other)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TxlogError> {
        Ok(serde_json::from_reader(std::fs::File::open(path)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub individual_id: u64,
    pub timestamp: NaiveDateTime,
    pub counterparty: String,
    pub direction: Direction,
    pub amount: f64,
}

impl LedgerRecord {
    pub fn category(&self, table: &CompanyTable) -> Category {
        table.category(&self.counterparty)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetRecord {
    pub individual_id: u64,
    pub timestamp: NaiveDateTime,
    pub message: BetMessage,
}

/// Realised results for both jackpots of one week, as `1`/`x`/`2` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeekResults {
    pub midweek: String,
    pub weekend: String,
}

impl WeekResults {
    pub fn from_outcomes(midweek: &[Outcome], weekend: &[Outcome]) -> Self {
        let s = |o: &[Outcome]| o.iter().map(|x| x.symbol()).collect::<String>();
        Self {
            midweek: s(midweek),
            weekend: s(weekend),
        }
    }

    pub fn for_kind(&self, kind: JackpotKind) -> &str {
        match kind {
            JackpotKind::Midweek => &self.midweek,
            JackpotKind::Weekend => &self.weekend,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calendar {
    /// Monday of panel week 0.
    pub start: NaiveDate,
    pub n_weeks: u32,
    pub results: Vec<WeekResults>,
    /// Everyone in the panel, including individuals without any records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub individuals: Option<Vec<u64>>,
}

impl Calendar {
    pub fn validate(&self) -> Result<(), TxlogError> {
        if self.start.weekday() != Weekday::Mon {
            return Err(TxlogError::Calendar(format!(
                "start {} is a {}, not a Monday",
                self.start,
                self.start.weekday()
            )));
        }
        if self.results.len() != self.n_weeks as usize {
            return Err(TxlogError::Calendar(format!(
                "{} weeks of results for {} weeks",
                self.results.len(),
                self.n_weeks
            )));
        }
        for (t, w) in self.results.iter().enumerate() {
            for kind in [JackpotKind::Midweek, JackpotKind::Weekend] {
                let r = w.for_kind(kind);
                if r.chars().count() != kind.n_matches() || !r.chars().all(|c| Outcome::from_symbol(c).is_some()) {
                    return Err(TxlogError::Calendar(format!("week {t}: bad {kind} results {r:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn week_start(&self, week: u32) -> NaiveDate {
        self.start + chrono::Days::new(7 * week as u64)
    }

    pub fn week_of(&self, ts: NaiveDateTime) -> Result<u32, TxlogError> {
        let days = (ts.date() - self.start).num_days();
        if days < 0 || days >= 7 * self.n_weeks as i64 {
            return Err(TxlogError::OutsideCalendar(ts));
        }
        Ok((days / 7) as u32)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TxlogError> {
        let cal: Calendar = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        cal.validate()?;
        Ok(cal)
    }
}

/// Sum the streams into one row per individual and calendar week. The roster
/// is the calendar's list of individuals when present, otherwise everyone who
/// appears in either stream.
pub fn aggregate_panel(
    records: &[LedgerRecord],
    bets: &[BetRecord],
    table: &CompanyTable,
    calendar: &Calendar,
) -> Result<Vec<PanelObservation>, TxlogError> {
    calendar.validate()?;
    let roster: BTreeSet<u64> = match &calendar.individuals {
        Some(ids) => ids.iter().copied().collect(),
        None => records
            .iter()
            .map(|r| r.individual_id)
            .chain(bets.iter().map(|b| b.individual_id))
            .collect(),
    };
    let slot: HashMap<u64, usize> = roster.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n_weeks = calendar.n_weeks as usize;
    let mut rows: Vec<PanelObservation> = roster
        .iter()
        .flat_map(|&id| (0..calendar.n_weeks).map(move |w| PanelObservation::empty(id, w)))
        .collect();
    let row_of = |id: u64, ts: NaiveDateTime| -> Result<Option<usize>, TxlogError> {
        let week = calendar.week_of(ts)? as usize;
        Ok(slot.get(&id).map(|s| s * n_weeks + week))
    };

    for b in bets {
        let Some(i) = row_of(b.individual_id, b.timestamp)? else { continue };
        let Some(kind) = b.message.kind() else { continue };
        let results = calendar.results[rows[i].week as usize].for_kind(kind);
        let correct = b
            .message
            .picks
            .iter()
            .zip(results.chars())
            .filter(|(p, r)| p.symbol() == *r)
            .count() as u32;
        let row = &mut rows[i];
        match kind {
            JackpotKind::Midweek => row.tickets_midweek += 1,
            JackpotKind::Weekend => row.tickets_weekend += 1,
        }
        row.picks_correct += correct;
    }

    for r in records {
        if !(r.amount > 0.0 && r.amount.is_finite()) {
            continue;
        }
        let Some(i) = row_of(r.individual_id, r.timestamp)? else { continue };
        let row = &mut rows[i];
        match (r.category(table), r.direction) {
            (Category::Betting, Direction::Debit) => row.betting_expenditure += r.amount,
            (Category::Betting, Direction::Credit) => {
                row.betting_income += r.amount;
                row.won_prize = true;
            }
            (Category::Savings, Direction::Debit) => row.savings_deposit += r.amount,
            (Category::Savings, Direction::Credit) => row.savings_withdrawal += r.amount,
            (Category::Loan, Direction::Credit) => {
                row.loans_received += r.amount;
                row.loan_applied = true;
            }
            (Category::Loan, Direction::Debit) => row.loan_repayments += r.amount,
            (Category::Other, _) => {}
        }
    }
    for row in &mut rows {
        row.finalize();
    }
    Ok(rows)
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT).ok()
}

/// One `individual_id<TAB>timestamp<TAB>message` line per ticket.
pub fn write_bets_log<W: Write>(mut out: W, bets: &[BetRecord]) -> std::io::Result<()> {
    for b in bets {
        writeln!(
            out,
            "{}\t{}\t{}",
            b.individual_id,
            format_timestamp(b.timestamp),
            format_bet_message(&b.message)
        )?;
    }
    out.flush()
}

/// Why a bets-log line was skipped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogLineError {
    /// Missing fields, bad id or bad timestamp.
    BadLine,
    Message(MessageError),
}

impl LogLineError {
    pub fn kind(&self) -> &'static str {
        match self {
            LogLineError::BadLine => "bad_line",
            LogLineError::Message(e) => e.kind(),
        }
    }
}

pub fn parse_bets_line(line: &str) -> Result<BetRecord, LogLineError> {
    let mut parts = line.splitn(3, '\t');
    let (Some(id), Some(ts), Some(msg)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(LogLineError::BadLine);
    };
    let individual_id = id.trim().parse().map_err(|_| LogLineError::BadLine)?;
    let timestamp = parse_timestamp(ts).ok_or(LogLineError::BadLine)?;
    let message = parse_bet_message(msg).map_err(LogLineError::Message)?;
    Ok(BetRecord {
        individual_id,
        timestamp,
        message,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseSummary {
    pub parsed: usize,
    /// Skipped lines per error kind.
    pub errors: BTreeMap<&'static str, usize>,
}

impl ParseSummary {
    pub fn skipped(&self) -> usize {
        self.errors.values().sum()
    }
}

/// Parse every non-blank line that is not a `#` comment, skipping and
/// counting the invalid ones.
pub fn read_bets_log<R: BufRead>(input: R) -> Result<(Vec<BetRecord>, ParseSummary), TxlogError> {
    let mut out = Vec::new();
    let mut summary = ParseSummary::default();
    for line in input.lines() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_bets_line(line) {
            Ok(b) => {
                summary.parsed += 1;
                out.push(b);
            }
            Err(e) => *summary.errors.entry(e.kind()).or_default() += 1,
        }
    }
    Ok((out, summary))
}

pub const LEDGER_COLUMNS: [&str; 5] = ["individual_id", "timestamp", "counterparty", "direction", "amount"];

pub fn write_ledger_csv<W: Write>(out: W, records: &[LedgerRecord]) -> Result<(), TxlogError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEDGER_COLUMNS)?;
    for r in records {
        w.write_record([
            r.individual_id.to_string(),
            format_timestamp(r.timestamp),
            r.counterparty.clone(),
            r.direction.to_string(),
            r.amount.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ledger_csv<R: Read>(input: R) -> Result<Vec<LedgerRecord>, TxlogError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = reader.headers()?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(LEDGER_COLUMNS) {
        *slot = headers.iter().position(|h| h.trim() == name).ok_or_else(|| TxlogError::Ledger {
            line: 1,
            message: format!("missing column `{name}`"),
        })?;
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |k: usize| rec.get(idx[k]).unwrap_or("").trim();
        let bad = |what: &str| TxlogError::Ledger {
            line,
            message: format!("bad {what} {:?}", get(LEDGER_COLUMNS.iter().position(|c| *c == what).unwrap_or(0))),
        };
        let individual_id = get(0).parse().map_err(|_| bad("individual_id"))?;
        let timestamp = parse_timestamp(get(1)).ok_or_else(|| bad("timestamp"))?;
        let direction = match get(3) {
            "credit" => Direction::Credit,
            "debit" => Direction::Debit,
            _ => return Err(bad("direction")),
        };
        let amount: f64 = get(4).parse().map_err(|_| bad("amount"))?;
        if !(amount > 0.0 && amount.is_finite()) {
            return Err(bad("amount"));
        }
        out.push(LedgerRecord {
            individual_id,
            timestamp,
            counterparty: get(2).to_string(),
            direction,
            amount,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Outcome::*;

    const EXAMPLE: &str = "You've placed Jackpot BetID abc123 2#1#2#x#2#1#1#1#2#x#1#1#x#1#2#1#2 for KSH 100. S-Pesa available balance KSH 100. Games resulted on full time.";

    #[test]
    fn example_message_parses_and_reformats() {
        let m = parse_bet_message(EXAMPLE).unwrap();
        assert_eq!(m.bet_id, "abc123");
        assert_eq!(m.picks.len(), 17);
        assert_eq!(&m.picks[..4], &[Away, Home, Away, Draw]);
        assert_eq!((m.stake, m.balance), (100, 100));
        assert_eq!(m.suffix, DEFAULT_SUFFIX);
        assert_eq!(format_bet_message(&m), EXAMPLE);
    }

    #[test]
    fn thirteen_home_picks() {
        let m = BetMessage::new("A1", vec![Home; 13], 5, 0);
        let s = format_bet_message(&m);
        assert!(s.contains(" 1#1#1#1#1#1#1#1#1#1#1#1#1 for KSH 5."));
        assert_eq!(parse_bet_message(&s).unwrap(), m);
    }

    #[test]
    fn error_cases_are_distinguished() {
        let with = |from: &str, to: &str| EXAMPLE.replacen(from, to, 1);
        assert_eq!(parse_bet_message("hello"), Err(MessageError::NotBetMessage));
        assert_eq!(
            parse_bet_message(&with("2#1#2#x", "3#1#2#x")),
            Err(MessageError::MalformedPicks("3".into()))
        );
        assert_eq!(parse_bet_message(&with("2#1#2#x#", "2#1#2#")), Err(MessageError::PickCount(16)));
        assert!(matches!(parse_bet_message(&with("KSH 100.", "KSH 1o0.")), Err(MessageError::BadAmount(_))));
        assert!(matches!(parse_bet_message(&with("KSH 100.", "KSH 0.")), Err(MessageError::BadAmount(_))));
        assert!(matches!(
            parse_bet_message(&EXAMPLE.replace("balance KSH 100.", "balance KSH 100.50.")),
            Err(MessageError::BadAmount(_))
        ));
        assert_eq!(parse_bet_message(&with("abc123", "ab-123")), Err(MessageError::NotBetMessage));
    }

    #[test]
    fn suffix_is_free_text() {
        let m = parse_bet_message(&EXAMPLE.replace(DEFAULT_SUFFIX, "Good luck!")).unwrap();
        assert_eq!(m.suffix, "Good luck!");
        let bare = EXAMPLE.replace(&format!(" {DEFAULT_SUFFIX}"), "");
        let m = parse_bet_message(&bare).unwrap();
        assert_eq!(m.suffix, "");
        assert_eq!(format_bet_message(&m), bare);
    }

    fn calendar() -> Calendar {
        Calendar {
            start: NaiveDate::from_ymd_opt(2018, 1, 1).unwrap(),
            n_weeks: 2,
            results: vec![WeekResults::from_outcomes(&[Home; 13], &[Draw; 17]); 2],
            individuals: None,
        }
    }

    fn ts(s: &str) -> NaiveDateTime {
        parse_timestamp(s).unwrap()
    }

    fn record(id: u64, when: &str, who: &str, dir: Direction, amount: f64) -> LedgerRecord {
        LedgerRecord {
            individual_id: id,
            timestamp: ts(when),
            counterparty: who.into(),
            direction: dir,
            amount,
        }
    }

    #[test]
    fn single_weekend_bet() {
        let mut picks = vec![Draw; 17];
        picks[0] = Home;
        let bets = [BetRecord {
            individual_id: 4,
            timestamp: ts("2018-01-06 10:00:00"),
            message: BetMessage::new("X", picks, 100, 0),
        }];
        let ledger = [record(4, "2018-01-06 10:00:00", "SportPesa", Direction::Debit, 100.0)];
        let panel = aggregate_panel(&ledger, &bets, &CompanyTable::default(), &calendar()).unwrap();
        assert_eq!(panel.len(), 2);
        assert_eq!(panel[0].tickets_weekend, 1);
        assert_eq!(panel[0].picks_correct, 16);
        assert_eq!(panel[0].betting_expenditure, 100.0);
        assert!(panel[0].placed_jackpot && !panel[1].placed_jackpot);
    }

    #[test]
    fn savings_flows_net_out() {
        let ledger = [
            record(1, "2018-01-02 09:00:00", "M-Shwari", Direction::Debit, 50.0),
            record(1, "2018-01-03 09:00:00", "M-Shwari", Direction::Debit, 50.0),
            record(1, "2018-01-04 09:00:00", "M-Shwari", Direction::Credit, 30.0),
            record(1, "2018-01-04 09:00:00", "Some Shop", Direction::Debit, 999.0),
            record(1, "2018-01-05 09:00:00", "Tala", Direction::Credit, 500.0),
        ];
        let panel = aggregate_panel(&ledger, &[], &CompanyTable::default(), &calendar()).unwrap();
        assert_eq!(panel[0].net_savings, 70.0);
        assert!(panel[0].loan_applied);
        assert_eq!(panel[0].betting_expenditure, 0.0);
    }

    #[test]
    fn empty_streams_and_out_of_range_times() {
        assert!(aggregate_panel(&[], &[], &CompanyTable::default(), &calendar()).unwrap().is_empty());
        let late = [record(1, "2018-01-15 00:00:00", "M-Shwari", Direction::Debit, 1.0)];
        assert!(matches!(
            aggregate_panel(&late, &[], &CompanyTable::default(), &calendar()),
            Err(TxlogError::OutsideCalendar(_))
        ));
        let mut c = calendar();
        c.start = NaiveDate::from_ymd_opt(2018, 1, 2).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn ledger_csv_round_trip() {
        let recs = vec![
            record(1, "2018-01-02 09:00:00", "Co-op Bank", Direction::Debit, 0.1 + 0.2),
            record(2, "2018-01-09 23:59:59", "SportPesa", Direction::Credit, 46000.0),
        ];
        let mut buf = Vec::new();
        write_ledger_csv(&mut buf, &recs).unwrap();
        assert_eq!(read_ledger_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn bets_log_skips_and_counts_bad_lines() {
        let good = format!("7\t2018-01-03 10:00:00\t{EXAMPLE}");
        let text = format!("# seed: 1\n{good}\n7\tnot-a-time\t{EXAMPLE}\n7\t2018-01-03 10:00:00\tjunk\n\n");
        let (bets, summary) = read_bets_log(text.as_bytes()).unwrap();
        assert_eq!(bets.len(), 1);
        assert_eq!(summary.errors["bad_line"], 1);
        assert_eq!(summary.errors["not_bet_message"], 1);
        let mut out = Vec::new();
        write_bets_log(&mut out, &bets).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().trim_end(), good);
    }
}
