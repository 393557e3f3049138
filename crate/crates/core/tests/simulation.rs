//! Simulator behaviour visible from the panel alone.

use betlearn::econlab::FeedbackMode;
use betlearn::simulator::{bucket_fill_check, simulate_panel, ScenarioConfig};

fn two_types() -> ScenarioConfig {
    ScenarioConfig::from_json(
        r#"{"population": 4000, "weeks": 8, "seed": 21, "agent_types": [
            {"name": "stubborn_low", "weight": 0.5, "ability": {"kind": "point", "value": 0.05},
             "prior": {"kind": "counts", "successes": 3, "failures": 17}, "update_rule": {"kind": "stubborn"},
             "cutoff": {"mean_cutoff": 0.15, "dispersion": 0.1, "shape": "normal"}},
            {"name": "bayesian_high", "weight": 0.5, "ability": {"kind": "point", "value": 0.6},
             "prior": {"kind": "counts", "successes": 3, "failures": 2}, "update_rule": {"kind": "bayesian"},
             "cutoff": {"mean_cutoff": 0.6, "dispersion": 0.1, "shape": "normal"}}]}"#,
    )
    .unwrap()
}

#[test]
fn stubborn_low_ability_bettors_rarely_fill_every_bucket() {
    let out = simulate_panel(&two_types()).unwrap();
    let kept = bucket_fill_check(&out.panel, 0.10, FeedbackMode::Relative);
    let rate = |name: &str| {
        let members: Vec<_> = out.agents.iter().filter(|a| a.type_name == name).collect();
        members.iter().filter(|a| !kept.contains(&a.individual_id)).count() as f64 / members.len() as f64
    };
    let (stubborn, bayesian) = (rate("stubborn_low"), rate("bayesian_high"));
    assert!(stubborn > bayesian, "excluded: stubborn {stubborn}, bayesian {bayesian}");
    assert!(stubborn > 0.5, "{stubborn}");
}

#[test]
fn stubborn_beliefs_never_move() {
    let out = simulate_panel(&two_types()).unwrap();
    for a in out.agents.iter().filter(|a| a.type_name == "stubborn_low") {
        assert_eq!(a.prior, a.final_belief);
    }
    for a in out.agents.iter().filter(|a| a.type_name == "bayesian_high") {
        let bet: f64 = out
            .panel
            .iter()
            .filter(|r| r.individual_id == a.individual_id)
            .map(|r| r.picks_total as f64)
            .sum();
        assert_eq!(a.final_belief.matches_bet(), bet);
    }
}

#[test]
fn panel_is_balanced_and_ordered() {
    let config = two_types();
    let out = simulate_panel(&config).unwrap();
    assert_eq!(out.panel.len() as u64, config.population * u64::from(config.weeks));
    for (i, r) in out.panel.iter().enumerate() {
        assert_eq!(r.individual_id, i as u64 / u64::from(config.weeks) + 1);
        assert_eq!(r.week, i as u32 % config.weeks);
        assert_eq!(r.placed_jackpot, r.tickets_midweek + r.tickets_weekend > 0);
        assert!(r.picks_correct <= r.picks_total);
    }
}

#[test]
fn seeds_change_draws_but_not_shape() {
    let mut config = two_types();
    let a = simulate_panel(&config).unwrap();
    config.seed += 1;
    let b = simulate_panel(&config).unwrap();
    assert_eq!(a.panel.len(), b.panel.len());
    assert_ne!(a.panel, b.panel);
}
