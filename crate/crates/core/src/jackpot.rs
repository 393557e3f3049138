//! Jackpot slates, prize ladders and exact prize probabilities.
//!
//! A jackpot asks for a 1/x/2 prediction on every match of a fixed slate: 13
//! matches midweek, 17 on the weekend. Bonuses are paid from 10 (midweek) or 12
//! (weekend) correct predictions upward. The same slate could be played as a
//! multibet, which pays the stake times the product of the chosen outcomes' odds.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JackpotError {
    #[error("{kind} jackpot must have {expected} matches, got {got}")]
    MatchCount {
        kind: JackpotKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} jackpot prize threshold must be {expected}, got {got}")]
    Threshold {
        kind: JackpotKind,
        expected: u32,
        got: u32,
    },
    #[error("prize ladder must cover every count from {from} to {to}; missing {missing}")]
    LadderGap { from: u32, to: u32, missing: u32 },
    #[error("prize ladder must be strictly increasing, but {correct} correct pays {amount} after {previous}")]
    LadderNotIncreasing {
        correct: u32,
        amount: f64,
        previous: f64,
    },
    #[error("prize ladder has an entry for {0} correct, outside the slate")]
    LadderOutOfRange(u32),
    #[error("match {index}: decimal odds must be finite and > 1, got {odds}")]
    BadOdds { index: usize, odds: f64 },
    #[error("match {index}: odds {odds} have more than two fractional digits")]
    OddsPrecision { index: usize, odds: f64 },
    #[error("match {index}: inverse odds sum to {sum}, leaving no bookmaker margin")]
    NoMargin { index: usize, sum: f64 },
    #[error("{correct} correct is outside 0..={n_matches}")]
    CorrectOutOfRange { correct: u32, n_matches: u32 },
    #[error("multibet needs at least one leg")]
    EmptyMultibet,
    #[error("multibet odds must be finite and >= 1, got {0}")]
    MultibetOdds(f64),
    #[error("stake must be positive, got {0}")]
    Stake(f64),
    #[error("reading slate file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing slate file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JackpotKind {
    Midweek,
    Weekend,
}

impl JackpotKind {
    pub fn n_matches(self) -> usize {
        match self {
            JackpotKind::Midweek => 13,
            JackpotKind::Weekend => 17,
        }
    }

    pub fn prize_threshold(self) -> u32 {
        match self {
            JackpotKind::Midweek => 10,
            JackpotKind::Weekend => 12,
        }
    }

    pub fn from_n_matches(n: usize) -> Option<Self> {
        match n {
            13 => Some(JackpotKind::Midweek),
            17 => Some(JackpotKind::Weekend),
            _ => None,
        }
    }
}

impl fmt::Display for JackpotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JackpotKind::Midweek => "midweek",
            JackpotKind::Weekend => "weekend",
        })
    }
}

/// Result of a single match, written `1` (home), `x` (draw) or `2` (away).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "1")]
    Home,
    #[serde(rename = "x")]
    Draw,
    #[serde(rename = "2")]
    Away,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Home, Outcome::Draw, Outcome::Away];

    pub fn symbol(self) -> char {
        match self {
            Outcome::Home => '1',
            Outcome::Draw => 'x',
            Outcome::Away => '2',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '1' => Some(Outcome::Home),
            'x' => Some(Outcome::Draw),
            '2' => Some(Outcome::Away),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            Outcome::Home => 0,
            Outcome::Draw => 1,
            Outcome::Away => 2,
        }
    }
}

/// Decimal odds for the three outcomes of one match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct MatchOdds {
    pub home: f64,
    pub draw: f64,
    pub away: f64,
}

impl From<[f64; 3]> for MatchOdds {
    fn from([home, draw, away]: [f64; 3]) -> Self {
        Self { home, draw, away }
    }
}

impl From<MatchOdds> for [f64; 3] {
    fn from(o: MatchOdds) -> Self {
        [o.home, o.draw, o.away]
    }
}

impl MatchOdds {
    pub fn new(home: f64, draw: f64, away: f64) -> Self {
        Self { home, draw, away }
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Home => self.home,
            Outcome::Draw => self.draw,
            Outcome::Away => self.away,
        }
    }

    pub fn inverse_sum(&self) -> f64 {
        1.0 / self.home + 1.0 / self.draw + 1.0 / self.away
    }

    /// Bookmaker margin: how far the inverse odds overshoot one.
    pub fn margin(&self) -> f64 {
        self.inverse_sum() - 1.0
    }

    /// Implied probabilities with the margin removed proportionally.
    pub fn implied_probabilities(&self) -> [f64; 3] {
        let total = self.inverse_sum();
        [
            1.0 / self.home / total,
            1.0 / self.draw / total,
            1.0 / self.away / total,
        ]
    }

    /// The shortest-priced outcome; ties go to the earlier of home, draw, away.
    pub fn favorite(&self) -> Outcome {
        let mut best = Outcome::Home;
        for o in [Outcome::Draw, Outcome::Away] {
            if self.get(o) < self.get(best) {
                best = o;
            }
        }
        best
    }

    pub fn favorite_probability(&self) -> f64 {
        self.implied_probabilities()[self.favorite().index()]
    }

    pub fn sample_outcome<R: Rng + ?Sized>(&self, rng: &mut R) -> Outcome {
        let p = self.implied_probabilities();
        let u: f64 = rng.random();
        if u < p[0] {
            Outcome::Home
        } else if u < p[0] + p[1] {
            Outcome::Draw
        } else {
            Outcome::Away
        }
    }
}

/// Prize amount per number of correct predictions, from the threshold upward.
pub type PrizeLadder = BTreeMap<u32, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JackpotSpec {
    pub kind: JackpotKind,
    pub n_matches: u32,
    pub prize_threshold: u32,
    pub prize_ladder: PrizeLadder,
    pub odds: Vec<MatchOdds>,
}

/// On-disk form of a slate: the kind fixes match count and threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlateFile {
    pub kind: JackpotKind,
    pub odds: Vec<MatchOdds>,
    #[serde(default)]
    pub prize_ladder: Option<PrizeLadder>,
}

impl JackpotSpec {
    pub fn new(
        kind: JackpotKind,
        prize_ladder: PrizeLadder,
        odds: Vec<MatchOdds>,
    ) -> Result<Self, JackpotError> {
        let spec = Self {
            kind,
            n_matches: kind.n_matches() as u32,
            prize_threshold: kind.prize_threshold(),
            prize_ladder,
            odds,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), JackpotError> {
        let expected = self.kind.n_matches();
        if self.n_matches as usize != expected || self.odds.len() != expected {
            return Err(JackpotError::MatchCount {
                kind: self.kind,
                expected,
                got: if self.n_matches as usize != expected {
                    self.n_matches as usize
                } else {
                    self.odds.len()
                },
            });
        }
        if self.prize_threshold != self.kind.prize_threshold() {
            return Err(JackpotError::Threshold {
                kind: self.kind,
                expected: self.kind.prize_threshold(),
                got: self.prize_threshold,
            });
        }
        validate_ladder(&self.prize_ladder, self.prize_threshold, self.n_matches)?;
        for (index, m) in self.odds.iter().enumerate() {
            for odds in [m.home, m.draw, m.away] {
                if !odds.is_finite() || odds <= 1.0 {
                    return Err(JackpotError::BadOdds { index, odds });
                }
                let cents = odds * 100.0;
                if (cents - cents.round()).abs() > 1e-6 {
                    return Err(JackpotError::OddsPrecision { index, odds });
                }
            }
            let sum = m.inverse_sum();
            if sum <= 1.0 {
                return Err(JackpotError::NoMargin { index, sum });
            }
        }
        Ok(())
    }

    /// Default weekend slate: the 17 matches of the 5 June 2021 example, with the
    /// KSH ladder.
    pub fn weekend_default() -> Self {
        Self::new(
            JackpotKind::Weekend,
            weekend_ladder_ksh(),
            TABLE1_SLATE.iter().map(|m| m.odds).collect(),
        )
        .expect("built-in weekend slate is valid")
    }

    /// Default midweek slate: the first 13 matches of the weekend example.
    pub fn midweek_default() -> Self {
        Self::new(
            JackpotKind::Midweek,
            midweek_ladder_ksh(),
            TABLE1_SLATE[..13].iter().map(|m| m.odds).collect(),
        )
        .expect("built-in midweek slate is valid")
    }

    pub fn default_for(kind: JackpotKind) -> Self {
        match kind {
            JackpotKind::Midweek => Self::midweek_default(),
            JackpotKind::Weekend => Self::weekend_default(),
        }
    }

    /// A slate where every outcome of every match carries the same odds.
    pub fn uniform_odds(kind: JackpotKind, odds: f64) -> Result<Self, JackpotError> {
        let ladder = match kind {
            JackpotKind::Midweek => midweek_ladder_ksh(),
            JackpotKind::Weekend => weekend_ladder_ksh(),
        };
        Self::new(
            kind,
            ladder,
            vec![MatchOdds::new(odds, odds, odds); kind.n_matches()],
        )
    }

    pub fn from_slate(file: SlateFile) -> Result<Self, JackpotError> {
        let ladder = file.prize_ladder.unwrap_or_else(|| match file.kind {
            JackpotKind::Midweek => midweek_ladder_ksh(),
            JackpotKind::Weekend => weekend_ladder_ksh(),
        });
        Self::new(file.kind, ladder, file.odds)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, JackpotError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_slate(serde_json::from_str(&text)?)
    }

    pub fn to_slate(&self) -> SlateFile {
        SlateFile {
            kind: self.kind,
            odds: self.odds.clone(),
            prize_ladder: Some(self.prize_ladder.clone()),
        }
    }

    pub fn with_ladder(mut self, ladder: PrizeLadder) -> Result<Self, JackpotError> {
        self.prize_ladder = ladder;
        self.validate()?;
        Ok(self)
    }
}

fn validate_ladder(ladder: &PrizeLadder, threshold: u32, n: u32) -> Result<(), JackpotError> {
    if let Some((&k, _)) = ladder.iter().find(|(&k, _)| k < threshold || k > n) {
        return Err(JackpotError::LadderOutOfRange(k));
    }
    let mut previous = 0.0;
    for correct in threshold..=n {
        let amount = *ladder.get(&correct).ok_or(JackpotError::LadderGap {
            from: threshold,
            to: n,
            missing: correct,
        })?;
        if !(amount > previous) || !amount.is_finite() {
            return Err(JackpotError::LadderNotIncreasing {
                correct,
                amount,
                previous,
            });
        }
        previous = amount;
    }
    Ok(())
}

/// Weekend bonuses of 31 March 2019 (USD), extended to 16 and 17 correct. The
/// 17-correct jackpot is the KSH 129 million quoted for the 5 June 2021 slate at
/// 100 KSH/USD; 16 is the geometric midpoint between 15 and 17.
pub fn weekend_ladder_usd() -> PrizeLadder {
    PrizeLadder::from([
        (12, 460.0),
        (13, 2_190.0),
        (14, 8_140.0),
        (15, 64_300.0),
        (16, 288_000.0),
        (17, 1_290_000.0),
    ])
}

pub fn weekend_ladder_ksh() -> PrizeLadder {
    weekend_ladder_usd()
        .into_iter()
        .map(|(k, usd)| (k, usd * KSH_PER_USD))
        .collect()
}

/// No midweek amounts are published; these grow by roughly 5x per extra correct
/// prediction, with a jackpot an order of magnitude below the weekend one.
pub fn midweek_ladder_ksh() -> PrizeLadder {
    PrizeLadder::from([
        (10, 10_000.0),
        (11, 50_000.0),
        (12, 250_000.0),
        (13, 15_000_000.0),
    ])
}

pub const KSH_PER_USD: f64 = 100.0;

/// Expected ability of a random guesser on a three-outcome match.
pub const RANDOM_GUESS_ABILITY: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy)]
pub struct SlateMatch {
    pub home: &'static str,
    pub away: &'static str,
    pub odds: MatchOdds,
    pub result: Outcome,
}

macro_rules! slate {
    ($(($h:expr, $a:expr, $oh:expr, $od:expr, $oa:expr, $r:ident)),* $(,)?) => {
        [$(SlateMatch {
            home: $h,
            away: $a,
            odds: MatchOdds { home: $oh, draw: $od, away: $oa },
            result: Outcome::$r,
        }),*]
    };
}

/// Weekend jackpot of 5 June 2021: odds and realised results.
pub const TABLE1_SLATE: [SlateMatch; 17] = slate![
    ("Black Leopards", "Bloemfontein Celtic", 2.87, 2.97, 2.63, Draw),
    ("Maritzburg United", "Amazulu FC", 2.58, 2.93, 2.98, Draw),
    ("TS Galaxy FC", "Kaizer Chiefs", 3.25, 2.8, 2.5, Away),
    ("GKS Belchatow", "GKS Jastrzebie Zdroj", 2.59, 3.34, 2.59, Away),
    ("Orgryte IS", "IFK Varnamo", 2.65, 3.4, 2.6, Draw),
    ("Plaza Colonia CD", "Nacional (URU)", 2.72, 3.46, 2.42, Away),
    ("IA Sud America", "CS Cerrito", 2.62, 3.06, 2.77, Draw),
    ("Zwiegen Kanazawa", "Omiya Adija", 2.54, 3.13, 2.88, Home),
    ("JEF United Chiba", "Montedio Yamagata", 2.74, 3.09, 2.69, Draw),
    ("OKS Odra Opole", "GKS Tychy", 3.0, 3.25, 2.4, Away),
    ("Zaglebie Sos.", "Gornik Leczna", 2.48, 3.45, 2.7, Away),
    ("Falkenbergs", "Vasteras SK", 2.9, 3.35, 2.41, Home),
    ("RoPs Rovaniemi", "EIF Ekenas", 2.46, 3.17, 2.87, Draw),
    ("Pogon Sieflce", "LKP Motor Lublin", 2.55, 3.18, 2.51, Draw),
    ("PK-35", "TPS Turku", 2.87, 3.08, 2.63, Draw),
    ("America Mineiro MG", "Corinthians", 2.78, 3.08, 2.63, Away),
    ("Germany U21", "Portugal U21", 2.55, 3.21, 2.8, Home),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JackpotResult {
    pub correct: u32,
    pub prize: f64,
    pub won_prize: bool,
}

/// Play one ticket: each match is predicted correctly with probability `ability`.
pub fn simulate_jackpot<R: Rng + ?Sized>(
    spec: &JackpotSpec,
    ability: f64,
    rng: &mut R,
) -> JackpotResult {
    let correct = Binomial::new(spec.n_matches as u64, ability.clamp(0.0, 1.0))
        .expect("probability clamped to [0,1]")
        .sample(rng) as u32;
    settle(spec, correct)
}

/// Prize outcome for a ticket with `correct` right predictions (assumed in range).
pub fn settle(spec: &JackpotSpec, correct: u32) -> JackpotResult {
    let prize = prize_tier(spec, correct).unwrap_or(0.0);
    JackpotResult {
        correct,
        prize,
        won_prize: prize > 0.0,
    }
}

pub fn prize_tier(spec: &JackpotSpec, correct: u32) -> Result<f64, JackpotError> {
    if correct > spec.n_matches {
        return Err(JackpotError::CorrectOutOfRange {
            correct,
            n_matches: spec.n_matches,
        });
    }
    if correct < spec.prize_threshold {
        return Ok(0.0);
    }
    Ok(spec.prize_ladder.get(&correct).copied().unwrap_or(0.0))
}

/// Probability that a ticket reaches the prize threshold.
pub fn prize_probability(spec: &JackpotSpec, ability: f64) -> f64 {
    binomial_upper_tail(spec.n_matches as u64, spec.prize_threshold as u64, ability)
}

/// `P(X >= k)` for `X ~ Binomial(n, p)`, summed term by term in log space.
///
/// Every term is positive, so the sum carries only relative rounding error even
/// when the tail is tiny; large `n` never overflows the coefficients.
pub fn binomial_upper_tail(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut ln_choose: f64 = (1..=k)
        .map(|i| (((n - k + i) as f64) / i as f64).ln())
        .sum();
    let mut terms = Vec::with_capacity((n - k + 1) as usize);
    for j in k..=n {
        terms.push(ln_choose + j as f64 * ln_p + (n - j) as f64 * ln_q);
        if j < n {
            ln_choose += (((n - j) as f64) / (j + 1) as f64).ln();
        }
    }
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    (peak + scaled.ln()).exp().min(1.0)
}

/// `P(sum >= k)` for independent Bernoulli trials with the given success
/// probabilities, by exact convolution of the count distribution.
pub fn poisson_binomial_upper_tail(probs: &[f64], k: usize) -> f64 {
    let mut dist = vec![0.0; probs.len() + 1];
    dist[0] = 1.0;
    for (j, &p) in probs.iter().enumerate() {
        for c in (0..=j + 1).rev() {
            let stay = dist[c] * (1.0 - p);
            let moved = if c > 0 { dist[c - 1] * p } else { 0.0 };
            dist[c] = stay + moved;
        }
    }
    dist.iter().skip(k).sum::<f64>().min(1.0)
}

/// Winning a prize by always backing the favourite.
pub fn favorite_strategy_probability(spec: &JackpotSpec) -> f64 {
    let probs: Vec<f64> = spec.odds.iter().map(MatchOdds::favorite_probability).collect();
    poisson_binomial_upper_tail(&probs, spec.prize_threshold as usize)
}

pub fn multibet_payout(outcome_odds: &[f64], stake: f64) -> Result<f64, JackpotError> {
    if outcome_odds.is_empty() {
        return Err(JackpotError::EmptyMultibet);
    }
    if !(stake > 0.0) || !stake.is_finite() {
        return Err(JackpotError::Stake(stake));
    }
    let mut payout = stake;
    for &odds in outcome_odds {
        if !odds.is_finite() || odds < 1.0 {
            return Err(JackpotError::MultibetOdds(odds));
        }
        payout *= odds;
    }
    Ok(payout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rational_tail(n: u64, k: u64, num: i64, den: i64) -> f64 {
        let p = BigRational::new(BigInt::from(num), BigInt::from(den));
        let q = BigRational::one() - &p;
        let mut total = BigRational::zero();
        for j in k..=n {
            let mut c = BigInt::one();
            for i in 0..j {
                c = c * BigInt::from(n - i) / BigInt::from(i + 1);
            }
            let mut term = BigRational::from_integer(c);
            for _ in 0..j {
                term *= &p;
            }
            for _ in 0..(n - j) {
                term *= &q;
            }
            total += term;
        }
        total.to_f64().unwrap()
    }

    #[test]
    fn default_specs_are_valid() {
        let w = JackpotSpec::weekend_default();
        assert_eq!((w.n_matches, w.prize_threshold), (17, 12));
        let m = JackpotSpec::midweek_default();
        assert_eq!((m.n_matches, m.prize_threshold), (13, 10));
    }

    #[test]
    fn table1_margins_exceed_one_and_normalise() {
        for m in TABLE1_SLATE {
            assert!(m.odds.inverse_sum() > 1.0);
            let p = m.odds.implied_probabilities();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let odds = TABLE1_SLATE.iter().map(|m| m.odds).collect::<Vec<_>>();
        assert!(matches!(
            JackpotSpec::new(JackpotKind::Midweek, midweek_ladder_ksh(), odds.clone()),
            Err(JackpotError::MatchCount { .. })
        ));
        let mut flat = weekend_ladder_ksh();
        flat.insert(14, 1.0);
        assert!(matches!(
            JackpotSpec::new(JackpotKind::Weekend, flat, odds.clone()),
            Err(JackpotError::LadderNotIncreasing { .. })
        ));
        let mut gap = weekend_ladder_ksh();
        gap.remove(&16);
        assert!(matches!(
            JackpotSpec::new(JackpotKind::Weekend, gap, odds.clone()),
            Err(JackpotError::LadderGap { missing: 16, .. })
        ));
        let mut fair = odds.clone();
        fair[3] = MatchOdds::new(3.0, 3.0, 3.0);
        assert!(matches!(
            JackpotSpec::new(JackpotKind::Weekend, weekend_ladder_ksh(), fair),
            Err(JackpotError::NoMargin { index: 3, .. })
        ));
        let mut precise = odds;
        precise[0].home = 2.875;
        assert!(matches!(
            JackpotSpec::new(JackpotKind::Weekend, weekend_ladder_ksh(), precise),
            Err(JackpotError::OddsPrecision { index: 0, .. })
        ));
    }

    #[test]
    fn slate_json_round_trip() {
        let spec = JackpotSpec::weekend_default();
        let text = serde_json::to_string(&spec.to_slate()).unwrap();
        assert!(text.contains("[2.87,2.97,2.63]"));
        let back = JackpotSpec::from_slate(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bare: SlateFile =
            serde_json::from_str(r#"{"kind":"midweek","odds":[[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9],[2.5,3.1,2.9]]}"#).unwrap();
        let spec = JackpotSpec::from_slate(bare).unwrap();
        assert_eq!(spec.prize_ladder, midweek_ladder_ksh());
    }

    #[test]
    fn simulate_extremes() {
        let spec = JackpotSpec::weekend_default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = simulate_jackpot(&spec, 1.0, &mut rng);
        assert_eq!(r.correct, 17);
        assert!(r.won_prize);
        let r = simulate_jackpot(&spec, 0.0, &mut rng);
        assert_eq!((r.correct, r.prize, r.won_prize), (0, 0.0, false));
    }

    #[test]
    fn simulated_mean_matches_binomial() {
        let spec = JackpotSpec::weekend_default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 1_000_000;
        let sum: u64 = (0..draws)
            .map(|_| simulate_jackpot(&spec, 1.0 / 3.0, &mut rng).correct as u64)
            .sum();
        let mean = sum as f64 / draws as f64;
        let sigma = (17.0 * (1.0 / 3.0) * (2.0 / 3.0) as f64).sqrt();
        assert!((mean - 17.0 / 3.0).abs() < 3.0 * sigma / 1e3, "{mean}");
    }

    #[test]
    fn prize_tier_examples() {
        let weekend = JackpotSpec::weekend_default();
        assert_eq!(prize_tier(&weekend, 11).unwrap(), 0.0);
        let usd = weekend.clone().with_ladder(weekend_ladder_usd()).unwrap();
        assert_eq!(prize_tier(&usd, 13).unwrap(), 2_190.0);
        assert_eq!(prize_tier(&usd, 12).unwrap(), 460.0);
        let midweek = JackpotSpec::midweek_default();
        assert_eq!(prize_tier(&midweek, 9).unwrap(), 0.0);
        assert!(prize_tier(&midweek, 10).unwrap() > 0.0);
        assert!(matches!(
            prize_tier(&midweek, 14),
            Err(JackpotError::CorrectOutOfRange { .. })
        ));
    }

    #[test]
    fn settle_links_prize_and_threshold() {
        let spec = JackpotSpec::weekend_default();
        for correct in 0..=17 {
            let r = settle(&spec, correct);
            assert_eq!(r.won_prize, correct >= 12);
            assert_eq!(r.won_prize, r.prize > 0.0);
        }
    }

    #[test]
    fn prize_probability_matches_rational_sum() {
        let spec = JackpotSpec::weekend_default();
        let exact = rational_tail(17, 12, 1, 3);
        assert!((prize_probability(&spec, 1.0 / 3.0) - exact).abs() < 1e-12);
        let midweek = JackpotSpec::midweek_default();
        let exact = rational_tail(13, 10, 1, 3);
        assert!((prize_probability(&midweek, 1.0 / 3.0) - exact).abs() < 1e-12);
        assert_eq!(prize_probability(&spec, 1.0), 1.0);
        assert_eq!(prize_probability(&spec, 0.0), 0.0);
    }

    #[test]
    fn large_n_tail_stays_accurate() {
        // n = 1000 at the mean: the upper tail is a little under one half.
        let t = binomial_upper_tail(1000, 500, 0.5);
        let exact = rational_tail(1000, 500, 1, 2);
        assert!((t - exact).abs() < 1e-12, "{t} vs {exact}");
        let far = binomial_upper_tail(1000, 900, 1.0 / 3.0);
        assert!(far > 0.0 && far < 1e-200);
        let near_one = binomial_upper_tail(1000, 10, 1.0 / 3.0);
        assert!((near_one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn favorites_reduce_to_iid_case() {
        let spec = JackpotSpec::uniform_odds(JackpotKind::Weekend, 2.9).unwrap();
        let a = favorite_strategy_probability(&spec);
        let b = prize_probability(&spec, 1.0 / 3.0);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn certain_favorites_always_win() {
        assert_eq!(poisson_binomial_upper_tail(&[1.0; 17], 12), 1.0);
        assert_eq!(poisson_binomial_upper_tail(&[0.0; 17], 1), 0.0);
    }

    #[test]
    fn table1_favorites_under_one_percent() {
        let p = favorite_strategy_probability(&JackpotSpec::weekend_default());
        assert!(p > 0.0 && p < 0.01, "{p}");
    }

    #[test]
    fn favorite_convolution_matches_monte_carlo() {
        let spec = JackpotSpec::weekend_default();
        let exact = favorite_strategy_probability(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 100_000;
        let wins = (0..draws)
            .filter(|_| {
                spec.odds
                    .iter()
                    .filter(|m| m.sample_outcome(&mut rng) == m.favorite())
                    .count()
                    >= 12
            })
            .count();
        let freq = wins as f64 / draws as f64;
        let se = (exact * (1.0 - exact) / draws as f64).sqrt();
        assert!((freq - exact).abs() < 3.0 * se, "{freq} vs {exact}");
    }

    #[test]
    fn simulated_prize_frequency_matches_exact() {
        let spec = JackpotSpec::midweek_default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ability = 0.45;
        let draws = 200_000;
        let wins = (0..draws)
            .filter(|_| simulate_jackpot(&spec, ability, &mut rng).won_prize)
            .count();
        let p = prize_probability(&spec, ability);
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((wins as f64 / draws as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn multibet_examples() {
        assert_eq!(multibet_payout(&[2.0], 10.0).unwrap(), 20.0);
        assert_eq!(multibet_payout(&[1.0; 5], 7.0).unwrap(), 7.0);
        let realised: Vec<f64> = TABLE1_SLATE.iter().map(|m| m.odds.get(m.result)).collect();
        let payout = multibet_payout(&realised, 1.0).unwrap();
        assert!((3.8e7..=4.6e7).contains(&payout), "{payout}");
        assert!(matches!(multibet_payout(&[], 1.0), Err(JackpotError::EmptyMultibet)));
        assert!(matches!(multibet_payout(&[0.5], 1.0), Err(JackpotError::MultibetOdds(_))));
        assert!(matches!(multibet_payout(&[2.0], 0.0), Err(JackpotError::Stake(_))));
    }

    proptest! {
        #[test]
        fn prize_probability_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let spec = JackpotSpec::weekend_default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(prize_probability(&spec, lo) <= prize_probability(&spec, hi) + 1e-15);
        }

        #[test]
        fn normalised_probabilities_sum_to_one(h in 101u32..900, d in 101u32..900, a in 101u32..900) {
            let m = MatchOdds::new(h as f64 / 100.0, d as f64 / 100.0, a as f64 / 100.0);
            let p = m.implied_probabilities();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
