//! Beta-distributed beliefs over a gambler's own prediction ability.
//!
//! A belief is the pair of counts that parameterise `Beta(s, u)`: successes and
//! failures observed before betting (watched matches) plus those accumulated from
//! settled bets. Conjugacy with the binomial likelihood makes every update a pure
//! count addition, so the expected ability after `m` more matches is affine in the
//! number of new successes.
//!
//! Counts are stored as `f64`. Whole counts up to 2^53 are represented exactly, so
//! Bayesian and stubborn updates are exact integer arithmetic; the asymmetric rule
//! scales increments by real weights and leaves the integer lattice for good.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Returned when a moment is requested of a belief with zero total count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("belief has zero total count (Haldane prior with no experience)")]
pub struct Uninformed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    pub prior_successes: f64,
    pub prior_failures: f64,
    pub bet_successes: f64,
    pub bet_failures: f64,
}

impl Belief {
    pub fn new(
        prior_successes: u64,
        prior_failures: u64,
        bet_successes: u64,
        bet_failures: u64,
    ) -> Self {
        Self {
            prior_successes: prior_successes as f64,
            prior_failures: prior_failures as f64,
            bet_successes: bet_successes as f64,
            bet_failures: bet_failures as f64,
        }
    }

    /// A belief formed from watched matches only.
    pub fn from_prior(successes: u64, failures: u64) -> Self {
        Self::new(successes, failures, 0, 0)
    }

    /// The improper `Beta(0, 0)` prior of someone who has never watched a match.
    pub fn haldane() -> Self {
        Self::new(0, 0, 0, 0)
    }

    pub fn matches_watched(&self) -> f64 {
        self.prior_successes + self.prior_failures
    }

    pub fn matches_bet(&self) -> f64 {
        self.bet_successes + self.bet_failures
    }

    pub fn total_successes(&self) -> f64 {
        self.prior_successes + self.bet_successes
    }

    pub fn total_failures(&self) -> f64 {
        self.prior_failures + self.bet_failures
    }

    pub fn total(&self) -> f64 {
        self.matches_watched() + self.matches_bet()
    }

    pub fn is_uninformed(&self) -> bool {
        self.total() == 0.0
    }

    /// True when every count is a whole number.
    pub fn is_integral(&self) -> bool {
        [
            self.prior_successes,
            self.prior_failures,
            self.bet_successes,
            self.bet_failures,
        ]
        .iter()
        .all(|c| c.fract() == 0.0)
    }

    pub fn update(&self, successes: u64, failures: u64, rule: &UpdateRule) -> Belief {
        posterior_update(self, successes, failures, rule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpdateRule {
    Bayesian,
    /// Belief frozen at the prior.
    Stubborn,
    /// Success and failure increments are multiplied by separate weights.
    Asymmetric {
        positive_weight: f64,
        negative_weight: f64,
    },
}

impl UpdateRule {
    pub fn asymmetric(positive_weight: f64, negative_weight: f64) -> Self {
        assert!(
            positive_weight >= 0.0 && negative_weight >= 0.0,
            "update weights must be non-negative"
        );
        UpdateRule::Asymmetric {
            positive_weight,
            negative_weight,
        }
    }

    /// Multipliers applied to (successes, failures).
    pub fn weights(&self) -> (f64, f64) {
        match *self {
            UpdateRule::Bayesian => (1.0, 1.0),
            UpdateRule::Stubborn => (0.0, 0.0),
            UpdateRule::Asymmetric {
                positive_weight,
                negative_weight,
            } => (positive_weight, negative_weight),
        }
    }

    pub fn is_valid(&self) -> bool {
        let (p, n) = self.weights();
        p.is_finite() && n.is_finite() && p >= 0.0 && n >= 0.0
    }
}

/// Conjugate posterior after observing `successes` correct and `failures` incorrect
/// predictions on settled bets.
pub fn posterior_update(
    belief: &Belief,
    successes: u64,
    failures: u64,
    rule: &UpdateRule,
) -> Belief {
    match rule {
        UpdateRule::Stubborn => *belief,
        UpdateRule::Bayesian => Belief {
            bet_successes: belief.bet_successes + successes as f64,
            bet_failures: belief.bet_failures + failures as f64,
            ..*belief
        },
        UpdateRule::Asymmetric {
            positive_weight,
            negative_weight,
        } => Belief {
            bet_successes: belief.bet_successes + positive_weight * successes as f64,
            bet_failures: belief.bet_failures + negative_weight * failures as f64,
            ..*belief
        },
    }
}

/// Posterior mean `(s_w + s_b) / (m_w + m_b)`; `None` for an uninformed belief.
pub fn expected_ability(belief: &Belief) -> Option<f64> {
    let total = belief.total();
    if total > 0.0 {
        Some(belief.total_successes() / total)
    } else {
        None
    }
}

/// Posterior variance of the Beta belief.
pub fn belief_variance(belief: &Belief) -> Result<f64, Uninformed> {
    let total = belief.total();
    if total <= 0.0 {
        return Err(Uninformed);
    }
    Ok(belief.total_successes() * belief.total_failures() / (total * total * (total + 1.0)))
}

/// Bet iff the expected ability clears this week's cutoff. An uninformed belief
/// always enters.
pub fn decide_bet(belief: &Belief, cutoff: f64) -> bool {
    match expected_ability(belief) {
        Some(mean) => mean >= cutoff,
        None => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffShape {
    #[default]
    Normal,
    /// Uniform on `mean ± dispersion·√3`, so `dispersion` is still the standard
    /// deviation before clamping.
    Uniform,
}

/// Week-to-week betting cutoff `c_t`, drawn independently per individual and week
/// and clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProcess {
    pub mean_cutoff: f64,
    #[serde(default)]
    pub dispersion: f64,
    #[serde(default)]
    pub shape: CutoffShape,
}

impl CutoffProcess {
    pub fn constant(cutoff: f64) -> Self {
        Self {
            mean_cutoff: cutoff,
            dispersion: 0.0,
            shape: CutoffShape::Normal,
        }
    }

    pub fn normal(mean_cutoff: f64, dispersion: f64) -> Self {
        Self {
            mean_cutoff,
            dispersion,
            shape: CutoffShape::Normal,
        }
    }

    pub fn uniform(mean_cutoff: f64, dispersion: f64) -> Self {
        Self {
            mean_cutoff,
            dispersion,
            shape: CutoffShape::Uniform,
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.mean_cutoff)
            && self.dispersion.is_finite()
            && self.dispersion >= 0.0
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let raw = if self.dispersion == 0.0 {
            self.mean_cutoff
        } else {
            match self.shape {
                CutoffShape::Normal => Normal::new(self.mean_cutoff, self.dispersion)
                    .expect("validated dispersion")
                    .sample(rng),
                CutoffShape::Uniform => {
                    let half = self.dispersion * 3f64.sqrt();
                    self.mean_cutoff + half * (2.0 * rng.random::<f64>() - 1.0)
                }
            }
        };
        raw.clamp(0.0, 1.0)
    }

    /// Probability that a belief with this posterior mean bets in a given week.
    pub fn bet_probability(&self, expected: f64) -> f64 {
        if self.dispersion == 0.0 {
            return if expected >= self.mean_cutoff { 1.0 } else { 0.0 };
        }
        // Clamping moves the mass outside [0,1] onto the endpoints.
        if expected >= 1.0 {
            return 1.0;
        }
        if expected < 0.0 {
            return 0.0;
        }
        let z = expected - self.mean_cutoff;
        match self.shape {
            CutoffShape::Normal => {
                0.5 * statrs::function::erf::erfc(-z / (self.dispersion * std::f64::consts::SQRT_2))
            }
            CutoffShape::Uniform => {
                let half = self.dispersion * 3f64.sqrt();
                ((z + half) / (2.0 * half)).clamp(0.0, 1.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haldane_update_is_count_addition() {
        let b = posterior_update(&Belief::haldane(), 5, 10, &UpdateRule::Bayesian);
        assert_eq!(b, Belief::new(0, 0, 5, 10));
    }

    #[test]
    fn symmetric_counts_give_one_half() {
        let b = Belief::from_prior(2, 3).update(3, 2, &UpdateRule::Bayesian);
        assert_eq!(b, Belief::new(2, 3, 3, 2));
        assert_eq!(expected_ability(&b), Some(0.5));
    }

    #[test]
    fn asymmetric_scales_success_increments() {
        let b = Belief::from_prior(1, 1).update(4, 0, &UpdateRule::asymmetric(2.0, 1.0));
        assert_eq!(b.bet_successes, 8.0);
        assert_eq!(b.bet_failures, 0.0);
    }

    #[test]
    fn asymmetric_unit_weights_match_bayesian() {
        let start = Belief::from_prior(3, 7);
        let a = start.update(11, 19, &UpdateRule::asymmetric(1.0, 1.0));
        let b = start.update(11, 19, &UpdateRule::Bayesian);
        assert_eq!(a, b);
    }

    #[test]
    fn stubborn_ignores_results() {
        let start = Belief::from_prior(3, 7);
        assert_eq!(start.update(17, 0, &UpdateRule::Stubborn), start);
    }

    #[test]
    fn expected_ability_examples() {
        assert_eq!(expected_ability(&Belief::from_prior(1, 2)), Some(1.0 / 3.0));
        assert_eq!(expected_ability(&Belief::new(0, 0, 33, 67)), Some(0.33));
        assert_eq!(expected_ability(&Belief::haldane()), None);
    }

    #[test]
    fn variance_examples() {
        assert_eq!(belief_variance(&Belief::from_prior(1, 1)), Ok(1.0 / 12.0));
        assert_eq!(belief_variance(&Belief::new(0, 0, 2, 2)), Ok(0.05));
        // 200·400 / (600²·601) = 80000 / 216360000 = 1 / 2704.5
        let v = belief_variance(&Belief::new(0, 0, 200, 400)).unwrap();
        assert!((v - 80_000.0 / 216_360_000.0).abs() < 1e-18);
        assert!((v - 3.698e-4).abs() < 1e-6);
        assert_eq!(belief_variance(&Belief::haldane()), Err(Uninformed));
    }

    #[test]
    fn decide_bet_examples() {
        // 0.40 vs 0.35
        assert!(decide_bet(&Belief::new(0, 0, 40, 60), 0.35));
        // weak inequality at 0.30
        assert!(decide_bet(&Belief::new(0, 0, 30, 70), 0.30));
        assert!(!decide_bet(&Belief::new(0, 0, 30, 70), 0.31));
        assert!(decide_bet(&Belief::new(0, 0, 0, 9), 0.0));
        assert!(decide_bet(&Belief::haldane(), 1.0));
    }

    #[test]
    fn cutoff_draws_are_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for process in [CutoffProcess::normal(0.5, 3.0), CutoffProcess::uniform(0.9, 1.0)] {
            for _ in 0..10_000 {
                let c = process.draw(&mut rng);
                assert!((0.0..=1.0).contains(&c));
            }
        }
        assert_eq!(CutoffProcess::constant(0.25).draw(&mut rng), 0.25);
    }

    #[test]
    fn bet_probability_matches_draw_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for process in [CutoffProcess::normal(0.35, 0.05), CutoffProcess::uniform(0.35, 0.1)] {
            let expected = 0.38;
            let n = 200_000;
            let hits = (0..n).filter(|_| expected >= process.draw(&mut rng)).count();
            let freq = hits as f64 / n as f64;
            let p = process.bet_probability(expected);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "{freq} vs {p}");
        }
    }

    fn rule_strategy() -> impl Strategy<Value = UpdateRule> {
        prop_oneof![
            Just(UpdateRule::Bayesian),
            Just(UpdateRule::Stubborn),
            (0u32..8, 0u32..8).prop_map(|(p, n)| UpdateRule::asymmetric(
                p as f64 / 4.0,
                n as f64 / 4.0
            )),
        ]
    }

    proptest! {
        #[test]
        fn batched_equals_sequential(
            prior in (0u64..50, 0u64..50),
            s1 in 0u64..1000, u1 in 0u64..1000,
            s2 in 0u64..1000, u2 in 0u64..1000,
            rule in rule_strategy(),
        ) {
            let b = Belief::from_prior(prior.0, prior.1);
            let seq = b.update(s1, u1, &rule).update(s2, u2, &rule);
            let batch = b.update(s1 + s2, u1 + u2, &rule);
            prop_assert_eq!(seq, batch);
        }

        #[test]
        fn expected_ability_is_affine_in_new_successes(
            prior in (1u64..40, 1u64..40),
            m in 1u64..60,
        ) {
            let b = Belief::from_prior(prior.0, prior.1);
            let slope = 1.0 / (b.total() + m as f64);
            let base = expected_ability(&b.update(0, m, &UpdateRule::Bayesian)).unwrap();
            for s in 0..=m {
                let e = expected_ability(&b.update(s, m - s, &UpdateRule::Bayesian)).unwrap();
                prop_assert!((e - (base + slope * s as f64)).abs() < 1e-12);
            }
        }

        #[test]
        fn expectation_monotone_in_bet_counts(
            prior in (0u64..40, 0u64..40),
            s in 0u64..100, u in 0u64..100,
        ) {
            let b = Belief::new(prior.0, prior.1, s, u + 1);
            let more_wins = Belief::new(prior.0, prior.1, s + 1, u + 1);
            let more_losses = Belief::new(prior.0, prior.1, s, u + 2);
            let e = expected_ability(&b).unwrap();
            // with zero successes the mean is pinned at 0 when no prior successes exist
            prop_assert!(expected_ability(&more_wins).unwrap() > e);
            if b.total_successes() > 0.0 {
                prop_assert!(expected_ability(&more_losses).unwrap() < e);
            }
        }

        #[test]
        fn variance_shrinks_with_count_at_fixed_mean(s in 1u64..20, u in 1u64..20, k in 1u64..20) {
            let small = belief_variance(&Belief::from_prior(s, u)).unwrap();
            let large = belief_variance(&Belief::from_prior(s * (k + 1), u * (k + 1))).unwrap();
            prop_assert!(large < small);
        }

        #[test]
        fn stubborn_decisions_never_change(
            prior in (0u64..40, 0u64..40),
            history in proptest::collection::vec((0u64..17, 0u64..17), 0..30),
            cutoff in 0.0f64..1.0,
        ) {
            let start = Belief::from_prior(prior.0, prior.1);
            let decision = decide_bet(&start, cutoff);
            let mut b = start;
            for (s, u) in history {
                b = b.update(s, u, &UpdateRule::Stubborn);
                prop_assert_eq!(decide_bet(&b, cutoff), decision);
            }
        }
    }

    #[test]
    fn variance_vanishes_in_the_limit() {
        let mut last = f64::INFINITY;
        for k in [1u64, 10, 100, 1000, 100_000] {
            let v = belief_variance(&Belief::from_prior(k, 2 * k)).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-5);
    }
}
