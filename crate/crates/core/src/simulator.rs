//! Synthetic gambler populations with planted abilities, learning rules and
//! financial responses to betting expenditure.
//!
//! Every agent owns two ChaCha streams keyed by the master seed: one drives
//! behaviour and outcomes, the other only the cosmetic details of the
//! transaction log (bet ids, timestamps, which picks were wrong). The panel is
//! therefore the same whether or not transactions are rendered. Weekly match
//! results come from a third, shared stream.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{decide_bet, Belief, CutoffProcess, UpdateRule};
use crate::econlab::feedback::{categorize_feedback, FeedbackMode};
use crate::econlab::transform::ihs;
use crate::jackpot::{settle, JackpotError, JackpotKind, JackpotSpec, Outcome, SlateFile};
use crate::panel::PanelObservation;
use crate::txlog::{
    BetMessage, BetRecord, Calendar, Direction, LedgerRecord, WeekResults, BETTING_COMPANY, LENDERS,
    SAVINGS_COMPANY,
};

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("population must be positive")]
    Population,
    #[error("need at least 2 weeks, got {0}")]
    Weeks(u32),
    #[error("agent_types: {0}")]
    Mixture(String),
    #[error("agent type `{name}`: {message}")]
    AgentType { name: String, message: String },
    #[error("financial: {0}")]
    Financial(String),
    #[error("start_date {0} is not a Monday")]
    StartDate(NaiveDate),
    #[error(transparent)]
    Jackpot(#[from] JackpotError),
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AbilityDistribution {
    Point { value: f64 },
    Uniform { low: f64, high: f64 },
    Beta { alpha: f64, beta: f64 },
}

impl AbilityDistribution {
    fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            AbilityDistribution::Point { value } => (0.0..=1.0).contains(&value),
            AbilityDistribution::Uniform { low, high } => 0.0 <= low && low <= high && high <= 1.0,
            AbilityDistribution::Beta { alpha, beta } => alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid ability distribution {self:?}"))
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AbilityDistribution::Point { value } => value,
            AbilityDistribution::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
            AbilityDistribution::Beta { alpha, beta } => Beta::new(alpha, beta).expect("validated").sample(rng),
        }
    }

    pub fn mass_above(&self, p: f64) -> f64 {
        match *self {
            AbilityDistribution::Point { value } => f64::from(u8::from(value > p)),
            AbilityDistribution::Uniform { low, high } => {
                if high <= low {
                    f64::from(u8::from(low > p))
                } else {
                    ((high - p) / (high - low)).clamp(0.0, 1.0)
                }
            }
            AbilityDistribution::Beta { alpha, beta } => {
                1.0 - crate::econlab::special::beta_inc(alpha, beta, p.clamp(0.0, 1.0)).unwrap_or(0.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSpec {
    /// Fixed pseudo-counts `(s_w, u_w)`.
    Counts { successes: u64, failures: u64 },
    /// `s_w ~ Bin(matches, θ)` from watching matches before betting.
    Watched { matches: u64 },
}

impl PriorSpec {
    fn draw<R: Rng + ?Sized>(&self, ability: f64, rng: &mut R) -> Belief {
        match *self {
            PriorSpec::Counts { successes, failures } => Belief::from_prior(successes, failures),
            PriorSpec::Watched { matches } => {
                let s = Binomial::new(matches, ability).expect("ability in [0,1]").sample(rng);
                Belief::from_prior(s, matches - s)
            }
        }
    }
}

/// Weights over 0, 1, 2, … tickets for each jackpot, conditioned on buying at
/// least one ticket in an active week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TicketDistribution {
    pub midweek: Vec<f64>,
    pub weekend: Vec<f64>,
}

impl Default for TicketDistribution {
    fn default() -> Self {
        Self {
            midweek: vec![0.5, 0.4, 0.1],
            weekend: vec![0.3, 0.55, 0.15],
        }
    }
}

fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> u32 {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i as u32;
        }
        u -= w;
    }
    (weights.len() - 1) as u32
}

impl TicketDistribution {
    fn validate(&self) -> Result<(), String> {
        for w in [&self.midweek, &self.weekend] {
            if w.is_empty() || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
                return Err("ticket weights must be non-negative with a positive sum".into());
            }
        }
        let none = |w: &[f64]| w.iter().skip(1).all(|x| *x == 0.0);
        if none(&self.midweek) && none(&self.weekend) {
            return Err("ticket weights never buy a ticket".into());
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        loop {
            let m = categorical(&self.midweek, rng);
            let w = categorical(&self.weekend, rng);
            if m + w > 0 {
                return (m, w);
            }
        }
    }
}

/// Integer stake per ticket, `max(1, round(median · exp(σ Z)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StakeDistribution {
    pub median: f64,
    pub sigma: f64,
}

impl Default for StakeDistribution {
    fn default() -> Self {
        Self {
            median: 50.0,
            sigma: 0.8,
        }
    }
}

impl StakeDistribution {
    fn draw<R: Rng + ?Sized>(&self, shift: f64, rng: &mut R) -> u64 {
        let z: f64 = rng.sample(StandardNormal);
        (self.median * (self.sigma * z + shift).exp()).round().max(1.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentType {
    pub name: String,
    pub weight: f64,
    pub ability: AbilityDistribution,
    pub prior: PriorSpec,
    pub update_rule: UpdateRule,
    pub cutoff: CutoffProcess,
    #[serde(default)]
    pub tickets: TicketDistribution,
    #[serde(default)]
    pub stake: StakeDistribution,
}

impl AgentType {
    fn validate(&self) -> Result<(), SimulationError> {
        let err = |message: String| SimulationError::AgentType {
            name: self.name.clone(),
            message,
        };
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(err(format!("weight {} must be non-negative", self.weight)));
        }
        self.ability.validate().map_err(err)?;
        if !self.update_rule.is_valid() {
            return Err(err("update weights must be finite and non-negative".into()));
        }
        if !self.cutoff.is_valid() {
            return Err(err("cutoff mean must lie in [0,1] with non-negative dispersion".into()));
        }
        self.tickets.validate().map_err(err)?;
        if !(self.stake.median >= 1.0 && self.stake.sigma >= 0.0 && self.stake.sigma.is_finite()) {
            return Err(err("stake median must be >= 1 KSH and sigma >= 0".into()));
        }
        Ok(())
    }
}

/// Financial outcomes: for each KSH flow, latent `L = β·ihs(expenditure) +
/// v_i + ε + level + γ·u` and amount `sinh(max(L, 0))`, rounded to cents.
/// Loan applications follow a linear probability model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinancialParams {
    pub beta_savings_withdrawal: f64,
    pub beta_savings_deposit: f64,
    pub beta_loan: f64,
    pub beta_loans_received: f64,
    pub beta_loan_repayments: f64,
    pub fixed_effect_scale: f64,
    pub noise_scale: f64,
    pub outcome_level: f64,
    pub loan_base_rate: f64,
    pub repayment_rate: f64,
    /// Loading of a weekly shock shared by stakes and every KSH outcome.
    pub confounding: f64,
}

impl Default for FinancialParams {
    fn default() -> Self {
        Self {
            beta_savings_withdrawal: 0.0,
            beta_savings_deposit: 0.0,
            beta_loan: 0.0,
            beta_loans_received: 0.0,
            beta_loan_repayments: 0.0,
            fixed_effect_scale: 1.0,
            noise_scale: 1.0,
            outcome_level: 7.0,
            loan_base_rate: 0.1,
            repayment_rate: 0.1,
            confounding: 0.0,
        }
    }
}

impl FinancialParams {
    fn validate(&self) -> Result<(), SimulationError> {
        let all = [
            self.beta_savings_withdrawal,
            self.beta_savings_deposit,
            self.beta_loan,
            self.beta_loans_received,
            self.beta_loan_repayments,
            self.fixed_effect_scale,
            self.noise_scale,
            self.outcome_level,
            self.loan_base_rate,
            self.repayment_rate,
            self.confounding,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(SimulationError::Financial("parameters must be finite".into()));
        }
        if self.fixed_effect_scale < 0.0 || self.noise_scale < 0.0 {
            return Err(SimulationError::Financial("scales must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.loan_base_rate) || !(0.0..=1.0).contains(&self.repayment_rate) {
            return Err(SimulationError::Financial("rates must lie in [0,1]".into()));
        }
        Ok(())
    }
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2018, 1, 1).expect("valid date")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub population: u64,
    pub weeks: u32,
    #[serde(default)]
    pub seed: u64,
    pub agent_types: Vec<AgentType>,
    #[serde(default)]
    pub financial: FinancialParams,
    /// Monday of week 0.
    #[serde(default = "default_start")]
    pub start_date: NaiveDate,
    #[serde(default)]
    pub midweek_slate: Option<SlateFile>,
    #[serde(default)]
    pub weekend_slate: Option<SlateFile>,
}

impl ScenarioConfig {
    pub fn new(population: u64, weeks: u32, seed: u64, agent_types: Vec<AgentType>) -> Self {
        Self {
            population,
            weeks,
            seed,
            agent_types,
            financial: FinancialParams::default(),
            start_date: default_start(),
            midweek_slate: None,
            weekend_slate: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimulationError> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimulationError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        use chrono::Datelike;
        if self.population == 0 {
            return Err(SimulationError::Population);
        }
        if self.weeks < 2 {
            return Err(SimulationError::Weeks(self.weeks));
        }
        if self.agent_types.is_empty() {
            return Err(SimulationError::Mixture("at least one agent type is required".into()));
        }
        for t in &self.agent_types {
            t.validate()?;
        }
        let total: f64 = self.agent_types.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimulationError::Mixture(format!("weights sum to {total}, not 1")));
        }
        self.financial.validate()?;
        if self.start_date.weekday() != chrono::Weekday::Mon {
            return Err(SimulationError::StartDate(self.start_date));
        }
        self.specs()?;
        Ok(())
    }

    fn specs(&self) -> Result<(JackpotSpec, JackpotSpec), SimulationError> {
        let load = |slate: &Option<SlateFile>, kind| -> Result<JackpotSpec, SimulationError> {
            match slate {
                Some(s) => {
                    let spec = JackpotSpec::from_slate(s.clone())?;
                    if spec.kind != kind {
                        return Err(SimulationError::Mixture(format!("{kind} slate has kind {}", spec.kind)));
                    }
                    Ok(spec)
                }
                None => Ok(JackpotSpec::default_for(kind)),
            }
        };
        Ok((
            load(&self.midweek_slate, JackpotKind::Midweek)?,
            load(&self.weekend_slate, JackpotKind::Weekend)?,
        ))
    }

    /// Number of agents of each type by largest remainder.
    pub fn type_counts(&self) -> Vec<u64> {
        let n = self.population as f64;
        let raw: Vec<f64> = self.agent_types.iter().map(|t| t.weight * n).collect();
        let mut counts: Vec<u64> = raw.iter().map(|r| r.floor() as u64).collect();
        let mut left = self.population - counts.iter().sum::<u64>();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
        for i in order.into_iter().cycle() {
            if left == 0 {
                break;
            }
            counts[i] += 1;
            left -= 1;
        }
        counts
    }
}

/// What the simulator planted for one individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTruth {
    pub individual_id: u64,
    pub agent_type: usize,
    pub type_name: String,
    pub ability: f64,
    pub prior: Belief,
    pub update_rule: UpdateRule,
    pub final_belief: Belief,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transactions {
    pub bets: Vec<BetRecord>,
    pub ledger: Vec<LedgerRecord>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    /// Sorted by individual and week.
    pub panel: Vec<PanelObservation>,
    pub agents: Vec<AgentTruth>,
    pub calendar: Calendar,
    pub transactions: Option<Transactions>,
}

const RENDER_KEY: u64 = 0x5bd1_e995_7f4a_7c15;
const WORLD_STREAM: u64 = u64::MAX;

fn keyed(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Realised outcomes of both slates for every week.
fn world_results(config: &ScenarioConfig, mid: &JackpotSpec, wk: &JackpotSpec) -> Vec<[Vec<Outcome>; 2]> {
    let mut rng = keyed(config.seed, WORLD_STREAM);
    (0..config.weeks)
        .map(|_| {
            let m = mid.odds.iter().map(|o| o.sample_outcome(&mut rng)).collect();
            let w = wk.odds.iter().map(|o| o.sample_outcome(&mut rng)).collect();
            [m, w]
        })
        .collect()
}

struct Ticket {
    kind: JackpotKind,
    stake: u64,
    correct: u32,
    prize: f64,
}

struct WeekFlows {
    withdrawal: f64,
    deposit: f64,
    loan: f64,
    repayment: f64,
}

fn amount(latent: f64) -> f64 {
    (latent.max(0.0).sinh() * 100.0).round() / 100.0
}

struct AgentRun {
    rows: Vec<PanelObservation>,
    truth: AgentTruth,
    transactions: Option<Transactions>,
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    midweek: JackpotSpec,
    weekend: JackpotSpec,
    results: Vec<[Vec<Outcome>; 2]>,
    render: bool,
}

fn simulate_agent(ctx: &Context, id: u64, type_index: usize) -> AgentRun {
    let config = ctx.config;
    let ty = &config.agent_types[type_index];
    let fin = &config.financial;
    let mut rng = keyed(config.seed, id);
    let ability = ty.ability.draw(&mut rng);
    let prior = ty.prior.draw(ability, &mut rng);
    let mut fe = [0.0; 4];
    for v in &mut fe {
        *v = fin.fixed_effect_scale * rng.sample::<f64, _>(StandardNormal);
    }
    let mut belief = prior;
    let mut rows = Vec::with_capacity(config.weeks as usize);
    let mut render = ctx.render.then(|| (keyed(config.seed ^ RENDER_KEY, id), Transactions::default()));
    let mut tickets: Vec<Ticket> = Vec::new();

    for week in 0..config.weeks {
        let shock: f64 = rng.sample(StandardNormal);
        let cutoff = ty.cutoff.draw(&mut rng);
        let mut row = PanelObservation::empty(id, week);
        tickets.clear();
        if decide_bet(&belief, cutoff) {
            let (n_mid, n_wk) = ty.tickets.draw(&mut rng);
            for (kind, count, spec) in [
                (JackpotKind::Midweek, n_mid, &ctx.midweek),
                (JackpotKind::Weekend, n_wk, &ctx.weekend),
            ] {
                for _ in 0..count {
                    let stake = ty.stake.draw(fin.confounding * shock, &mut rng);
                    let correct = Binomial::new(spec.n_matches as u64, ability)
                        .expect("ability in [0,1]")
                        .sample(&mut rng) as u32;
                    let prize = settle(spec, correct).prize;
                    tickets.push(Ticket { kind, stake, correct, prize });
                }
            }
            row.tickets_midweek = n_mid;
            row.tickets_weekend = n_wk;
            for t in &tickets {
                row.picks_correct += t.correct;
                row.betting_expenditure += t.stake as f64;
                if t.prize > 0.0 {
                    row.betting_income += t.prize;
                    row.won_prize = true;
                }
            }
            let picks = 13 * n_mid + 17 * n_wk;
            belief = belief.update(row.picks_correct as u64, (picks - row.picks_correct) as u64, &ty.update_rule);
        }

        let x = ihs(row.betting_expenditure);
        let latent = |beta: f64, v: f64, rng: &mut ChaCha8Rng| {
            let e: f64 = rng.sample(StandardNormal);
            beta * x + v + fin.noise_scale * e + fin.outcome_level + fin.confounding * shock
        };
        let withdrawal = amount(latent(fin.beta_savings_withdrawal, fe[0], &mut rng));
        let deposit = amount(latent(fin.beta_savings_deposit, fe[1], &mut rng));
        let loan_latent = latent(fin.beta_loans_received, fe[2], &mut rng);
        let repay_latent = latent(fin.beta_loan_repayments, fe[3], &mut rng);
        let applied = rng.random::<f64>() < (fin.loan_base_rate + fin.beta_loan * x).clamp(0.0, 1.0);
        let repays = rng.random::<f64>() < fin.repayment_rate;
        let flows = WeekFlows {
            withdrawal,
            deposit,
            loan: if applied { amount(loan_latent) } else { 0.0 },
            repayment: if repays { amount(repay_latent) } else { 0.0 },
        };
        row.savings_withdrawal = flows.withdrawal;
        row.savings_deposit = flows.deposit;
        row.loans_received = flows.loan;
        row.loan_applied = flows.loan > 0.0;
        row.loan_repayments = flows.repayment;
        row.finalize();

        if let Some((rrng, tx)) = render.as_mut() {
            render_week(ctx, id, week, &tickets, &flows, rrng, tx);
        }
        rows.push(row);
    }
    AgentRun {
        rows,
        truth: AgentTruth {
            individual_id: id,
            agent_type: type_index,
            type_name: ty.name.clone(),
            ability,
            prior,
            update_rule: ty.update_rule,
            final_belief: belief,
        },
        transactions: render.map(|(_, tx)| tx),
    }
}

const ALPHANUMERIC: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

fn at(date: NaiveDate, day: u64, hour: u32, minute: u32) -> NaiveDateTime {
    (date + chrono::Days::new(day)).and_time(NaiveTime::from_hms_opt(hour, minute, 0).expect("valid time"))
}

fn render_week(
    ctx: &Context,
    id: u64,
    week: u32,
    tickets: &[Ticket],
    flows: &WeekFlows,
    rng: &mut ChaCha8Rng,
    tx: &mut Transactions,
) {
    let monday = ctx.config.start_date + chrono::Days::new(7 * week as u64);
    let start = tx.ledger.len();
    for t in tickets {
        // midweek tickets on Tuesday, weekend tickets on Saturday
        let day = if t.kind == JackpotKind::Midweek { 1 } else { 5 };
        let minutes = rng.random_range(0..600u32);
        let ts = at(monday, day, 8 + minutes / 60, minutes % 60);
        let results = &ctx.results[week as usize][usize::from(t.kind == JackpotKind::Weekend)];
        let n = results.len();
        let right: BTreeSet<usize> = sample_indices(rng, n, t.correct as usize).into_iter().collect();
        let picks = (0..n)
            .map(|j| {
                if right.contains(&j) {
                    results[j]
                } else {
                    let others: Vec<Outcome> =
                        [Outcome::Home, Outcome::Draw, Outcome::Away].into_iter().filter(|o| *o != results[j]).collect();
                    others[rng.random_range(0..2)]
                }
            })
            .collect();
        let bet_id: String = (0..10).map(|_| ALPHANUMERIC[rng.random_range(0..ALPHANUMERIC.len())] as char).collect();
        let balance = rng.random_range(0..2_000u64);
        tx.bets.push(BetRecord {
            individual_id: id,
            timestamp: ts,
            message: BetMessage::new(bet_id, picks, t.stake, balance),
        });
        tx.ledger.push(LedgerRecord {
            individual_id: id,
            timestamp: ts,
            counterparty: BETTING_COMPANY.into(),
            direction: Direction::Debit,
            amount: t.stake as f64,
        });
        if t.prize > 0.0 {
            // paid the evening the jackpot resolves: Wednesday or Sunday
            let day = if t.kind == JackpotKind::Midweek { 2 } else { 6 };
            tx.ledger.push(LedgerRecord {
                individual_id: id,
                timestamp: at(monday, day, 21, 0),
                counterparty: BETTING_COMPANY.into(),
                direction: Direction::Credit,
                amount: t.prize,
            });
        }
    }
    let mut flow = |amount: f64, day: u64, who: &str, direction: Direction, rng: &mut ChaCha8Rng| {
        if amount > 0.0 {
            let minutes = rng.random_range(0..600u32);
            tx.ledger.push(LedgerRecord {
                individual_id: id,
                timestamp: at(monday, day, 8 + minutes / 60, minutes % 60),
                counterparty: who.into(),
                direction,
                amount,
            });
        }
    };
    flow(flows.deposit, 0, SAVINGS_COMPANY, Direction::Debit, rng);
    flow(flows.withdrawal, 3, SAVINGS_COMPANY, Direction::Credit, rng);
    let lender = LENDERS[rng.random_range(0..LENDERS.len())];
    flow(flows.loan, 2, lender, Direction::Credit, rng);
    flow(flows.repayment, 4, lender, Direction::Debit, rng);
    tx.ledger[start..].sort_by_key(|r| r.timestamp);
}

fn run(config: &ScenarioConfig, render: bool) -> Result<SimulationOutput, SimulationError> {
    config.validate()?;
    let (midweek, weekend) = config.specs()?;
    let results = world_results(config, &midweek, &weekend);
    let calendar = Calendar {
        start: config.start_date,
        n_weeks: config.weeks,
        results: results
            .iter()
            .map(|[m, w]| WeekResults::from_outcomes(m, w))
            .collect(),
        individuals: Some((1..=config.population).collect()),
    };
    let ctx = Context {
        config,
        midweek,
        weekend,
        results,
        render,
    };
    let mut assignment = Vec::with_capacity(config.population as usize);
    for (t, &count) in config.type_counts().iter().enumerate() {
        assignment.extend(std::iter::repeat_n(t, count as usize));
    }
    let runs: Vec<AgentRun> = assignment
        .par_iter()
        .enumerate()
        .map(|(i, &t)| simulate_agent(&ctx, i as u64 + 1, t))
        .collect();
    let mut panel = Vec::with_capacity(config.population as usize * config.weeks as usize);
    let mut agents = Vec::with_capacity(runs.len());
    let mut transactions = render.then(Transactions::default);
    for r in runs {
        panel.extend(r.rows);
        agents.push(r.truth);
        if let (Some(all), Some(tx)) = (transactions.as_mut(), r.transactions) {
            all.bets.extend(tx.bets);
            all.ledger.extend(tx.ledger);
        }
    }
    Ok(SimulationOutput {
        panel,
        agents,
        calendar,
        transactions,
    })
}

/// Panel, ground truth, calendar and the full transaction stream.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimulationOutput, SimulationError> {
    run(config, true)
}

/// Same panel as [`run_scenario`] without rendering transactions.
pub fn simulate_panel(config: &ScenarioConfig) -> Result<SimulationOutput, SimulationError> {
    run(config, false)
}

/// Individuals with at least one positive, negative and base feedback week.
pub fn bucket_fill_check(panel: &[PanelObservation], cutoff: f64, mode: FeedbackMode) -> BTreeSet<u64> {
    match categorize_feedback(panel, cutoff, mode) {
        Ok(c) => c.all_bucket_individuals(panel),
        Err(_) => BTreeSet::new(),
    }
}
