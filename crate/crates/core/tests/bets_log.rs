//! Bet message and log-line parsing: round trips and hostile input.

use betlearn::jackpot::Outcome;
use betlearn::txlog::{
    format_bet_message, parse_bet_message, parse_bets_line, read_bets_log, write_bets_log, BetMessage, BetRecord,
};
use chrono::NaiveDate;
use proptest::prelude::*;

fn outcome() -> impl Strategy<Value = Outcome> {
    prop_oneof![Just(Outcome::Home), Just(Outcome::Draw), Just(Outcome::Away)]
}

fn message() -> impl Strategy<Value = BetMessage> {
    (
        "[A-Za-z0-9]{1,12}",
        prop_oneof![Just(13usize), Just(17usize)].prop_flat_map(|n| proptest::collection::vec(outcome(), n)),
        1u64..10_000_000,
        0u64..10_000_000,
        "[ -~]{0,40}",
    )
        .prop_map(|(id, picks, stake, balance, suffix)| BetMessage {
            bet_id: id,
            picks,
            stake,
            balance,
            suffix,
        })
}

proptest! {
    #[test]
    fn message_round_trip(m in message()) {
        prop_assert_eq!(parse_bet_message(&format_bet_message(&m)), Ok(m));
    }

    #[test]
    fn arbitrary_text_never_panics(line in "\\PC{0,200}") {
        let _ = parse_bet_message(&line);
        let _ = parse_bets_line(&line);
    }

    #[test]
    fn truncated_messages_are_rejected(m in message(), cut in 0usize..60) {
        let text = format_bet_message(&m);
        let keep = text.len().saturating_sub(cut + m.suffix.len() + 2);
        if let Some(prefix) = text.get(..keep) {
            prop_assert!(parse_bet_message(prefix).is_err(), "{prefix:?}");
        }
    }

    #[test]
    fn log_round_trip(ms in proptest::collection::vec(message(), 0..20), id in 1u64..1_000_000) {
        let ts = NaiveDate::from_ymd_opt(2019, 6, 1).unwrap().and_hms_opt(12, 30, 0).unwrap();
        let records: Vec<BetRecord> = ms
            .into_iter()
            .map(|mut m| {
                // a log line ends at the newline, so the suffix cannot carry one
                m.suffix = m.suffix.replace(['\n', '\t'], " ");
                BetRecord { individual_id: id, timestamp: ts, message: m }
            })
            .collect();
        let mut buf = Vec::new();
        write_bets_log(&mut buf, &records).unwrap();
        let (back, summary) = read_bets_log(buf.as_slice()).unwrap();
        prop_assert_eq!(summary.skipped(), 0);
        prop_assert_eq!(back, records);
    }
}

#[test]
fn example_message() {
    let m = parse_bet_message(
        "You've placed Jackpot BetID abc123 2#1#2#x#2#1#1#1#2#x#1#1#x#1#2#1#2 for KSH 100. \
         S-Pesa available balance KSH 100. Games resulted on full time.",
    )
    .unwrap();
    assert_eq!(m.bet_id, "abc123");
    assert_eq!(m.picks.len(), 17);
    assert_eq!(m.picks[3], Outcome::Draw);
    assert_eq!((m.stake, m.balance), (100, 100));
    assert_eq!(m.suffix, "Games resulted on full time.");
}

#[test]
fn wrong_pick_counts_are_named() {
    let m = BetMessage::new("A1", vec![Outcome::Home; 17], 10, 0);
    let text = format_bet_message(&m).replacen("1#", "", 1);
    assert_eq!(parse_bet_message(&text).unwrap_err().kind(), "pick_count");
}
