//! Wire codec: canonical JSON text with sorted keys.
//!
//! Absent optional fields are omitted rather than written as `null`, and
//! unknown keys are dropped on decode. Unknown enum values are rejected.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::types::{DelegateRecord, Message, TaskResult, TaskSubmit};
use super::validate::{Validate, Violation};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("malformed message: {0}")]
    MalformedMessage(String),
    #[error("invariant violation: {}", join_violations(.0))]
    InvariantViolation(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Encodes any wire value canonically.
///
/// Going through `serde_json::Value` sorts object keys, so equal values
/// always produce identical bytes.
pub fn encode<T: Serialize>(value: &T) -> Vec<u8> {
    let tree = serde_json::to_value(value).expect("wire types always serialize");
    serde_json::to_vec(&tree).expect("a JSON tree always serializes")
}

pub fn encode_message(msg: &Message) -> Vec<u8> {
    encode(msg)
}

/// Decodes a single value of a known kind and checks its invariants.
pub fn decode<T>(bytes: &[u8]) -> Result<T, DecodeError>
where
    T: DeserializeOwned + Validate,
{
    let tree = parse_object(bytes)?;
    from_tree(Value::Object(tree))
}

/// Decodes a message of any kind, picking the kind from its required keys.
pub fn decode_message(bytes: &[u8]) -> Result<Message, DecodeError> {
    let tree = parse_object(bytes)?;
    let msg = if tree.contains_key("payload") {
        Message::TaskSubmit(from_tree::<TaskSubmit>(Value::Object(tree))?)
    } else if tree.contains_key("output") {
        Message::TaskResult(from_tree::<TaskResult>(Value::Object(tree))?)
    } else if tree.contains_key("delegate_id") {
        Message::IdentityCard(from_tree::<DelegateRecord>(Value::Object(tree))?)
    } else {
        return Err(DecodeError::MalformedMessage(
            "object has none of payload, output, delegate_id".into(),
        ));
    };
    Ok(msg)
}

fn parse_object(bytes: &[u8]) -> Result<Map<String, Value>, DecodeError> {
    match serde_json::from_slice::<Value>(bytes) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(other) => Err(DecodeError::MalformedMessage(format!(
            "expected a JSON object, found {}",
            kind_name(&other)
        ))),
        Err(e) => Err(DecodeError::MalformedMessage(e.to_string())),
    }
}

fn from_tree<T>(tree: Value) -> Result<T, DecodeError>
where
    T: DeserializeOwned + Validate,
{
    let value: T = serde_json::from_value(tree).map_err(|e| DecodeError::MalformedMessage(e.to_string()))?;
    let violations = value.validate_invariants();
    if violations.is_empty() {
        Ok(value)
    } else {
        Err(DecodeError::InvariantViolation(violations))
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::fixtures;
    use crate::protocol::types::*;

    fn keys(bytes: &[u8]) -> Vec<String> {
        let v: Value = serde_json::from_slice(bytes).unwrap();
        v.as_object().unwrap().keys().cloned().collect()
    }

    #[test]
    fn submit_without_contract_has_two_keys() {
        let bytes = encode_message(&fixtures::canonical_submit(false).into());
        assert_eq!(keys(&bytes), ["payload", "task_id"]);
    }

    #[test]
    fn contract_grows_the_message() {
        let bare = encode_message(&fixtures::canonical_submit(false).into());
        let full = encode_message(&fixtures::canonical_submit(true).into());
        let contract = encode(&fixtures::quarterly_report_contract());
        // `,"contract":` plus the contract object itself.
        assert_eq!(full.len(), bare.len() + contract.len() + 12);
    }

    #[test]
    fn keys_are_sorted_and_nulls_omitted() {
        let bytes = encode_message(&fixtures::canonical_submit(true).into());
        let text = String::from_utf8(bytes).unwrap();
        assert!(!text.contains("null"));
        assert!(text.find("\"contract\"").unwrap() < text.find("\"payload\"").unwrap());
        assert!(text.contains(r#""deadline":"2026-03-15T18:00:00Z""#));
        assert!(text.contains(r#""max_cost_usd":"0.05""#));
    }

    #[test]
    fn legacy_submit_decodes() {
        let msg = decode_message(br#"{"task_id":"t-1","payload":"hello"}"#).unwrap();
        let Message::TaskSubmit(submit) = msg else {
            panic!("wrong kind")
        };
        assert!(submit.contract.is_none());
    }

    #[test]
    fn unknown_key_is_dropped() {
        let msg = decode_message(br#"{"task_id":"t-1","payload":"hello","future_field":{"a":1}}"#).unwrap();
        assert_eq!(
            msg,
            Message::TaskSubmit(TaskSubmit {
                task_id: "t-1".into(),
                payload: "hello".into(),
                contract: None,
            })
        );
    }

    #[test]
    fn quality_above_one_is_invariant_violation() {
        let err = decode_message(
            br#"{"delegate_id":"d1","claims":[{"skill":"reasoning","value":1.3,"claim_type":"self_claimed"}]}"#,
        )
        .unwrap_err();
        match err {
            DecodeError::InvariantViolation(v) => assert_eq!(v[0].field, "claims[0].value"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_claim_type_is_rejected() {
        let err = decode_message(
            br#"{"delegate_id":"d1","claims":[{"skill":"s","value":0.5,"claim_type":"crowd_sourced"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, DecodeError::MalformedMessage(_)));
    }

    #[test]
    fn syntax_and_shape_errors_are_malformed() {
        for input in [&b"{"[..], b"[]", b"42", br#"{"task_id":"t"}"#, b"\xff"] {
            assert!(
                matches!(decode_message(input), Err(DecodeError::MalformedMessage(_))),
                "{:?}",
                String::from_utf8_lossy(input)
            );
        }
    }

    #[test]
    fn negative_tokens_are_malformed_negative_cost_is_violation() {
        let neg_tokens =
            br#"{"task_id":"t","output":"o","tokens_used":-1,"cost_usd":"0","completed_at":"2026-03-15T17:00:00Z"}"#;
        assert!(matches!(
            decode_message(neg_tokens),
            Err(DecodeError::MalformedMessage(_))
        ));
        let neg_cost =
            br#"{"task_id":"t","output":"o","tokens_used":1,"cost_usd":"-0.01","completed_at":"2026-03-15T17:00:00Z"}"#;
        assert!(matches!(
            decode_message(neg_cost),
            Err(DecodeError::InvariantViolation(_))
        ));
    }

    #[test]
    fn typed_decode_of_error_value() {
        let err = crate::error_model::make_contract_violation(&["budget".into()], "out").unwrap();
        let back: LdpError = decode(&encode(&err)).unwrap();
        assert_eq!(back, err);
    }
}
