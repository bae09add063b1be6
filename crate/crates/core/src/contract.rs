//! Client-side validation of delegate results against their contract.
//!
//! Checks run on receipt: budget against the reported usage, deadline
//! against the local receipt time. What happens next depends on the
//! contract's failure policy.

use std::fmt;

use rust_decimal::prelude::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error_model::make_contract_violation;
use crate::protocol::{DelegationContract, FailurePolicy, LdpError, Provenance, TaskResult, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationRule {
    BudgetTokens,
    BudgetCost,
    Deadline,
    DelegationDepth,
}

impl ViolationRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationRule::BudgetTokens => "budget_tokens",
            ViolationRule::BudgetCost => "budget_cost",
            ViolationRule::Deadline => "deadline",
            ViolationRule::DelegationDepth => "delegation_depth",
        }
    }
}

/// A breached limit. Deadlines report Unix seconds for both numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractViolation {
    pub rule: ViolationRule,
    pub detail: String,
    pub observed: f64,
    pub limit: f64,
}

impl fmt::Display for ContractViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule.as_str(), self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Accepted,
    AcceptedWithLog,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub violations: Vec<ContractViolation>,
    pub disposition: Disposition,
}

impl ValidationOutcome {
    pub fn new(violations: Vec<ContractViolation>, policy: FailurePolicy) -> Self {
        let disposition = match (violations.is_empty(), policy) {
            (true, _) => Disposition::Accepted,
            (false, FailurePolicy::FailOpen) => Disposition::AcceptedWithLog,
            (false, FailurePolicy::FailClosed) => Disposition::Rejected,
        };
        Self {
            violations,
            disposition,
        }
    }
}

/// Compares a result against the contract's budget and deadline.
///
/// Limits are inclusive. The deadline is checked against `received_at`,
/// never the delegate's self-reported completion time.
pub fn check_result(contract: &DelegationContract, result: &TaskResult, received_at: Timestamp) -> ValidationOutcome {
    let mut violations = Vec::new();

    if let Some(budget) = &contract.policy.budget {
        if let Some(max) = budget.max_tokens {
            if result.tokens_used > max {
                violations.push(ContractViolation {
                    rule: ViolationRule::BudgetTokens,
                    detail: format!("used {} tokens, limit {}", result.tokens_used, max),
                    observed: result.tokens_used as f64,
                    limit: max as f64,
                });
            }
        }
        if let Some(max) = budget.max_cost_usd {
            if result.cost_usd > max {
                violations.push(ContractViolation {
                    rule: ViolationRule::BudgetCost,
                    detail: format!("cost ${}, limit ${}", result.cost_usd, max),
                    observed: result.cost_usd.to_f64().unwrap_or(f64::INFINITY),
                    limit: max.to_f64().unwrap_or(f64::INFINITY),
                });
            }
        }
    }

    if let Some(deadline) = contract.deadline {
        if received_at > deadline {
            violations.push(ContractViolation {
                rule: ViolationRule::Deadline,
                detail: format!(
                    "received {}, deadline {}",
                    received_at.to_rfc3339(),
                    deadline.to_rfc3339()
                ),
                observed: unix_seconds(received_at),
                limit: unix_seconds(deadline),
            });
        }
    }

    ValidationOutcome::new(violations, contract.policy.failure_policy)
}

fn unix_seconds(t: Timestamp) -> f64 {
    t.timestamp() as f64 + f64::from(t.timestamp_subsec_nanos()) * 1e-9
}

/// A result the delegator keeps, with the violations it chose to tolerate.
#[derive(Debug, Clone, PartialEq)]
pub struct Accepted {
    pub result: TaskResult,
    pub log: Vec<ContractViolation>,
}

pub fn apply_policy(outcome: ValidationOutcome, result: TaskResult) -> Result<Accepted, LdpError> {
    match outcome.disposition {
        Disposition::Rejected => {
            let described: Vec<String> = outcome.violations.iter().map(ToString::to_string).collect();
            Err(make_contract_violation(&described, result.output)
                .expect("a rejected outcome always carries violations"))
        }
        Disposition::Accepted | Disposition::AcceptedWithLog => Ok(Accepted {
            result,
            log: outcome.violations,
        }),
    }
}

/// Flags a lineage with more hops than the contract allows.
pub fn check_depth(contract: &DelegationContract, provenance: &Provenance) -> Option<ContractViolation> {
    let max = contract.policy.max_delegation_depth?;
    let hops = provenance.depth();
    (hops > max as usize).then(|| ContractViolation {
        rule: ViolationRule::DelegationDepth,
        detail: format!(
            "{hops} delegation hops ({}), limit {max}",
            provenance.lineage.join(" -> ")
        ),
        observed: hops as f64,
        limit: f64::from(max),
    })
}

/// One line of the validation log stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationLogRecord {
    pub rule: ViolationRule,
    pub detail: String,
    pub observed: f64,
    pub limit: f64,
    pub contract_id: String,
    pub task_id: String,
}

impl ViolationLogRecord {
    pub fn new(v: &ContractViolation, contract_id: &str, task_id: &str) -> Self {
        Self {
            rule: v.rule,
            detail: v.detail.clone(),
            observed: v.observed,
            limit: v.limit,
            contract_id: contract_id.to_string(),
            task_id: task_id.to_string(),
        }
    }
}
