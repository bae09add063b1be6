//! Canonical messages shared by the demo trace, the overhead benchmark and tests.

use chrono::{TimeZone, Utc};
use rust_decimal::Decimal;

use super::types::*;

pub const CANONICAL_TASK_ID: &str = "task-2026-03-15-0042";

/// Quarterly-report summarization contract: 6000 tokens, $0.05, fail closed.
pub fn quarterly_report_contract() -> DelegationContract {
    DelegationContract {
        contract_id: "ctr-7f3a9c1e-52b4-4d0a-9e8f-6a1b2c3d4e5f".into(),
        objective: "Summarize the quarterly report".into(),
        success_criteria: vec!["<=300 words".into(), "include revenue figures".into()],
        policy: PolicyEnvelope {
            failure_policy: FailurePolicy::FailClosed,
            budget: Some(Budget {
                max_tokens: Some(6000),
                max_cost_usd: Some(Decimal::new(5, 2)),
            }),
            safety_constraints: vec!["no speculative projections".into()],
            max_delegation_depth: Some(2),
        },
        deadline: Some(Utc.with_ymd_and_hms(2026, 3, 15, 18, 0, 0).unwrap()),
    }
}

pub fn canonical_submit(with_contract: bool) -> TaskSubmit {
    TaskSubmit {
        task_id: CANONICAL_TASK_ID.into(),
        payload: "Summarize the attached Q4 quarterly report for the finance team. \
                  Focus on revenue, operating margin and guidance changes."
            .into(),
        contract: with_contract.then(quarterly_report_contract),
    }
}

/// A delegate result that finished on time but spent 8200 tokens.
pub fn over_budget_result() -> TaskResult {
    TaskResult {
        task_id: CANONICAL_TASK_ID.into(),
        output: "Q4 revenue rose 12% year over year to $4.2B, driven by cloud services. \
                 Operating margin held at 21%. Full-year guidance was left unchanged."
            .into(),
        tokens_used: 8200,
        cost_usd: Decimal::new(41, 3),
        completed_at: Utc.with_ymd_and_hms(2026, 3, 15, 17, 42, 10).unwrap(),
        provenance: Some(Provenance {
            verification_status: VerificationStatus::SelfVerified,
            evidence_refs: vec![],
            lineage: vec!["orchestrator".into(), "summarizer-b".into()],
        }),
    }
}
