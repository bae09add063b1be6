//! Type invariants, reported as data rather than errors.

use std::collections::HashSet;
use std::fmt;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::types::*;
use crate::error_model::default_semantics;

/// One broken invariant: the field path and the rule it breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

pub trait Validate {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>);

    /// Empty iff every invariant holds.
    fn validate_invariants(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.collect_violations("", &mut out);
        out
    }
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

fn push(out: &mut Vec<Violation>, path: &str, field: &str, rule: impl Into<String>) {
    out.push(Violation {
        field: join(path, field),
        rule: rule.into(),
    });
}

impl Validate for DelegationContract {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        if self.contract_id.is_empty() {
            push(out, path, "contract_id", "must be non-empty");
        }
        self.policy.collect_violations(&join(path, "policy"), out);
    }
}

impl Validate for PolicyEnvelope {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        // max_delegation_depth is unsigned, so the >= 0 rule holds by construction.
        if let Some(budget) = &self.budget {
            budget.collect_violations(&join(path, "budget"), out);
        }
    }
}

impl Validate for Budget {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let field = if path.is_empty() { "Budget" } else { path };
        if self.max_tokens.is_none() && self.max_cost_usd.is_none() {
            out.push(Violation {
                field: field.to_string(),
                rule: "at least one of max_tokens, max_cost_usd must be present".into(),
            });
        }
        if self.max_tokens == Some(0) {
            push(out, path, "max_tokens", "must be strictly positive");
        }
        if matches!(self.max_cost_usd, Some(c) if c <= Decimal::ZERO) {
            push(out, path, "max_cost_usd", "must be strictly positive");
        }
    }
}

impl Validate for QualityClaim {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        if !(0.0..=1.0).contains(&self.value) {
            push(out, path, "value", format!("{} is outside [0, 1]", self.value));
        }
        if self.claim_type == Some(ClaimType::IssuerAttested) && self.issuer.is_none() {
            push(out, path, "issuer", "required when claim_type is issuer_attested");
        }
    }
}

impl Validate for DelegateRecord {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        if self.delegate_id.is_empty() {
            push(out, path, "delegate_id", "must be non-empty");
        }
        let mut seen = HashSet::new();
        for (i, claim) in self.claims.iter().enumerate() {
            let claim_path = join(path, &format!("claims[{i}]"));
            claim.collect_violations(&claim_path, out);
            if !seen.insert((claim.skill.as_str(), claim.trust_level())) {
                out.push(Violation {
                    field: claim_path,
                    rule: format!(
                        "duplicate claim for skill {:?} at level {}",
                        claim.skill,
                        claim.trust_level().as_str()
                    ),
                });
            }
        }
    }
}

impl Validate for LdpError {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let expected = default_semantics(self.category);
        if self.retryable != expected.retryable || self.severity != expected.severity {
            push(
                out,
                path,
                "category",
                format!(
                    "{} requires retryable={} severity={:?}",
                    self.category.as_str(),
                    expected.retryable,
                    expected.severity
                ),
            );
        }
        if self.code.is_empty() {
            push(out, path, "code", "must be non-empty");
        }
    }
}

impl Validate for Provenance {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        if self.lineage.is_empty() {
            push(out, path, "lineage", "must name at least the producing delegate");
        }
    }
}

impl Validate for TaskSubmit {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        if self.task_id.is_empty() {
            push(out, path, "task_id", "must be non-empty");
        }
        if let Some(contract) = &self.contract {
            contract.collect_violations(&join(path, "contract"), out);
        }
    }
}

impl Validate for TaskResult {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        if self.task_id.is_empty() {
            push(out, path, "task_id", "must be non-empty");
        }
        if self.cost_usd < Decimal::ZERO {
            push(out, path, "cost_usd", "must be non-negative");
        }
        if let Some(provenance) = &self.provenance {
            provenance.collect_violations(&join(path, "provenance"), out);
        }
    }
}

impl Validate for Message {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        match self {
            Message::TaskSubmit(m) => m.collect_violations(path, out),
            Message::TaskResult(m) => m.collect_violations(path, out),
            Message::IdentityCard(m) => m.collect_violations(path, out),
        }
    }
}
