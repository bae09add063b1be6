//! Random valid protocol messages for the wire tests.

#![allow(dead_code)]

use chrono::{DateTime, Duration, TimeZone, Utc};
use ldp_governance::error_model::default_semantics;
use ldp_governance::protocol::*;
use rand::seq::IndexedRandom;
use rand::Rng;
use rust_decimal::Decimal;
use serde_json::Value;

const WORDS: &[&str] = &[
    "alpha",
    "report",
    "ünïcode",
    "q4",
    "\"quoted\"",
    "tab\there",
    "",
    "line\nbreak",
    "€42",
];
const SKILLS: &[&str] = &["reasoning", "summarization", "translation", "code"];

fn text<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(0..5);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn id<R: Rng>(rng: &mut R, prefix: &str) -> String {
    format!("{prefix}-{:08x}", rng.random::<u32>())
}

fn timestamp<R: Rng>(rng: &mut R) -> DateTime<Utc> {
    let base = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
    let t = base + Duration::seconds(rng.random_range(0..400_000_000));
    if rng.random_bool(0.3) {
        t + Duration::milliseconds(rng.random_range(1..1000))
    } else {
        t
    }
}

fn money<R: Rng>(rng: &mut R, min: i64) -> Decimal {
    Decimal::new(rng.random_range(min..1_000_000), rng.random_range(0..7))
}

fn some<R: Rng, T>(rng: &mut R, f: impl FnOnce(&mut R) -> T) -> Option<T> {
    rng.random_bool(0.5).then(|| f(rng))
}

pub fn random_contract<R: Rng>(rng: &mut R) -> DelegationContract {
    let budget = some(rng, |rng| {
        let mut budget = Budget {
            max_tokens: some(rng, |rng| rng.random_range(1..1_000_000)),
            max_cost_usd: some(rng, |rng| money(rng, 1)),
        };
        if budget.max_tokens.is_none() && budget.max_cost_usd.is_none() {
            budget.max_tokens = Some(6000);
        }
        budget
    });
    DelegationContract {
        contract_id: id(rng, "ctr"),
        objective: text(rng),
        success_criteria: (0..rng.random_range(0..3)).map(|_| text(rng)).collect(),
        policy: PolicyEnvelope {
            failure_policy: if rng.random_bool(0.5) {
                FailurePolicy::FailClosed
            } else {
                FailurePolicy::FailOpen
            },
            budget,
            safety_constraints: (0..rng.random_range(0..3)).map(|_| text(rng)).collect(),
            max_delegation_depth: some(rng, |rng| rng.random_range(0..6)),
        },
        deadline: some(rng, timestamp),
    }
}

pub fn random_submit<R: Rng>(rng: &mut R) -> TaskSubmit {
    TaskSubmit {
        task_id: id(rng, "task"),
        payload: text(rng),
        contract: some(rng, random_contract),
    }
}

pub fn random_result<R: Rng>(rng: &mut R) -> TaskResult {
    let statuses = [
        VerificationStatus::Unverified,
        VerificationStatus::SelfVerified,
        VerificationStatus::PeerVerified,
        VerificationStatus::ToolVerified,
        VerificationStatus::HumanVerified,
    ];
    TaskResult {
        task_id: id(rng, "task"),
        output: text(rng),
        tokens_used: rng.random_range(0..100_000),
        cost_usd: money(rng, 0),
        completed_at: timestamp(rng),
        provenance: some(rng, |rng| Provenance {
            verification_status: *statuses.choose(rng).unwrap(),
            evidence_refs: (0..rng.random_range(0..3)).map(|_| id(rng, "ev")).collect(),
            lineage: (0..rng.random_range(1..5)).map(|_| id(rng, "d")).collect(),
        }),
    }
}

pub fn random_record<R: Rng>(rng: &mut R) -> DelegateRecord {
    // At most one claim per (skill, trust level).
    let mut claims = Vec::new();
    for skill in SKILLS {
        for claim_type in ClaimType::ALL {
            if !rng.random_bool(0.2) {
                continue;
            }
            let value = if rng.random_bool(0.1) {
                rng.random_range(0..=1) as f64
            } else {
                rng.random::<f64>()
            };
            let mut claim = QualityClaim::new(*skill, value, claim_type);
            if claim_type == ClaimType::IssuerAttested || rng.random_bool(0.3) {
                claim = claim.with_issuer(id(rng, "iss"));
            }
            if rng.random_bool(0.5) {
                claim = claim.observed_at(timestamp(rng));
            }
            // An untyped claim ranks as self_claimed, so only that slot may drop its type.
            if claim_type == ClaimType::SelfClaimed && rng.random_bool(0.3) {
                claim.claim_type = None;
            }
            claims.push(claim);
        }
    }
    DelegateRecord::new(id(rng, "delegate"), claims)
}

pub fn random_message<R: Rng>(rng: &mut R) -> Message {
    match rng.random_range(0..3) {
        0 => random_submit(rng).into(),
        1 => random_result(rng).into(),
        _ => random_record(rng).into(),
    }
}

pub fn random_error<R: Rng>(rng: &mut R) -> LdpError {
    let category = *ErrorCategory::ALL.choose(rng).unwrap();
    let s = default_semantics(category);
    LdpError {
        category,
        severity: s.severity,
        retryable: s.retryable,
        code: id(rng, "E"),
        message: text(rng),
        partial_output: some(rng, text),
    }
}

/// Adds keys no schema knows about to every object in the tree. The keys
/// avoid the ones that decide a message's kind.
pub fn inject_unknown_keys<R: Rng>(value: &mut Value, rng: &mut R) {
    match value {
        Value::Object(map) => {
            for child in map.values_mut() {
                inject_unknown_keys(child, rng);
            }
            for _ in 0..rng.random_range(1..3) {
                let junk = match rng.random_range(0..4) {
                    0 => Value::Null,
                    1 => Value::from(rng.random::<i32>()),
                    2 => Value::from(text(rng)),
                    _ => serde_json::json!({"nested": [1, "two", null], "payload": "not a kind marker here"}),
                };
                map.insert(format!("x_ext_{}", rng.random::<u16>()), junk);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| inject_unknown_keys(v, rng)),
        _ => {}
    }
}
