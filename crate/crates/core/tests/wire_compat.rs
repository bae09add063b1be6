mod common;

use ldp_governance::protocol::{
    decode, decode_message, encode, encode_message, DecodeError, LdpError, Message, TaskResult,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LEGACY: &str = include_str!("fixtures/legacy_messages.jsonl");

#[test]
fn legacy_corpus_decodes_and_reencodes_stably() {
    let mut kinds = [0usize; 3];
    for line in LEGACY.lines() {
        let msg = decode_message(line.as_bytes()).unwrap_or_else(|e| panic!("{line}: {e}"));
        kinds[match msg {
            Message::TaskSubmit(_) => 0,
            Message::TaskResult(_) => 1,
            Message::IdentityCard(_) => 2,
        }] += 1;
        let bytes = encode_message(&msg);
        assert_eq!(decode_message(&bytes).unwrap(), msg);
        assert!(!String::from_utf8(bytes).unwrap().contains("null"));
    }
    assert!(kinds.iter().all(|&k| k >= 5), "{kinds:?}");
}

#[test]
fn legacy_result_keeps_its_offset_timestamp_instant() {
    let line = LEGACY.lines().find(|l| l.contains("+02:00")).unwrap();
    let result: TaskResult = decode(line.as_bytes()).unwrap();
    assert_eq!(result.completed_at.to_rfc3339(), "2025-11-04T06:00:00+00:00");
}

#[test]
fn out_of_range_value_is_an_invariant_violation_not_malformed() {
    let line = r#"{"delegate_id":"x","claims":[{"skill":"s","value":1.5}]}"#;
    assert!(matches!(
        decode_message(line.as_bytes()),
        Err(DecodeError::InvariantViolation(_))
    ));
    let line = r#"{"delegate_id":"x","claims":[{"skill":"s","value":0.5,"claim_type":"vibes"}]}"#;
    assert!(matches!(
        decode_message(line.as_bytes()),
        Err(DecodeError::MalformedMessage(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_messages_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg = common::random_message(&mut rng);
        let bytes = encode_message(&msg);
        prop_assert_eq!(decode_message(&bytes).unwrap(), msg.clone());

        let mut tree = serde_json::to_value(&msg).unwrap();
        common::inject_unknown_keys(&mut tree, &mut rng);
        let injected = decode_message(&serde_json::to_vec(&tree).unwrap()).unwrap();
        prop_assert_eq!(encode_message(&injected), bytes);
    }

    #[test]
    fn random_errors_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let err = common::random_error(&mut rng);
        prop_assert_eq!(decode::<LdpError>(&encode(&err)).unwrap(), err);
    }
}
