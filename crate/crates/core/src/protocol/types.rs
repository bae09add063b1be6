//! Governance data types carried by delegation messages.
//!
//! Every type here is a plain immutable value. Optional governance fields use
//! serde defaults so that messages produced by peers that predate them decode
//! unchanged.

use chrono::{DateTime, Utc};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

/// UTC instant, RFC 3339 on the wire.
pub type Timestamp = DateTime<Utc>;

/// Intent, bounds and failure policy attached to a delegated task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelegationContract {
    pub contract_id: String,
    pub objective: String,
    /// Free-form; stored and echoed, never evaluated.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub success_criteria: Vec<String>,
    pub policy: PolicyEnvelope,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyEnvelope {
    pub failure_policy: FailurePolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub safety_constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_delegation_depth: Option<u32>,
}

/// What the delegator does with a result that breaks the contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailurePolicy {
    /// Reject with a typed error; the delegate output travels as partial output.
    FailClosed,
    /// Accept the result and log each violation.
    FailOpen,
}

/// Resource ceiling for a delegated task. Limits are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "rust_decimal::serde::str_option"
    )]
    pub max_cost_usd: Option<Decimal>,
}

/// How a quality score was established. Variants are declared in
/// increasing order of trust, so `Ord` is the trust scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimType {
    SelfClaimed,
    RuntimeObserved,
    IssuerAttested,
    ExternallyBenchmarked,
}

impl ClaimType {
    pub const ALL: [ClaimType; 4] = [
        ClaimType::SelfClaimed,
        ClaimType::RuntimeObserved,
        ClaimType::IssuerAttested,
        ClaimType::ExternallyBenchmarked,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimType::SelfClaimed => "self_claimed",
            ClaimType::RuntimeObserved => "runtime_observed",
            ClaimType::IssuerAttested => "issuer_attested",
            ClaimType::ExternallyBenchmarked => "externally_benchmarked",
        }
    }
}

/// A skill-scoped quality score and its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityClaim {
    pub skill: String,
    pub value: f64,
    /// Absent on cards from peers that predate claim typing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim_type: Option<ClaimType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issuer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_at: Option<Timestamp>,
}

impl QualityClaim {
    pub fn new(skill: impl Into<String>, value: f64, claim_type: ClaimType) -> Self {
        Self {
            skill: skill.into(),
            value,
            claim_type: Some(claim_type),
            issuer: None,
            observed_at: None,
        }
    }

    pub fn with_issuer(mut self, issuer: impl Into<String>) -> Self {
        self.issuer = Some(issuer.into());
        self
    }

    pub fn observed_at(mut self, at: Timestamp) -> Self {
        self.observed_at = Some(at);
        self
    }

    /// Untyped claims carry no provenance and rank as self-reported.
    pub fn trust_level(&self) -> ClaimType {
        self.claim_type.unwrap_or(ClaimType::SelfClaimed)
    }
}

/// Identity card of a delegate: its id and the quality claims it advertises.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelegateRecord {
    pub delegate_id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<QualityClaim>,
}

impl DelegateRecord {
    pub fn new(delegate_id: impl Into<String>, claims: Vec<QualityClaim>) -> Self {
        Self {
            delegate_id: delegate_id.into(),
            claims,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Runtime,
    Transport,
    Policy,
    Capability,
    Quality,
    Identity,
    Session,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 7] = [
        ErrorCategory::Runtime,
        ErrorCategory::Transport,
        ErrorCategory::Policy,
        ErrorCategory::Capability,
        ErrorCategory::Quality,
        ErrorCategory::Identity,
        ErrorCategory::Session,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Runtime => "runtime",
            ErrorCategory::Transport => "transport",
            ErrorCategory::Policy => "policy",
            ErrorCategory::Capability => "capability",
            ErrorCategory::Quality => "quality",
            ErrorCategory::Identity => "identity",
            ErrorCategory::Session => "session",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
    Fatal,
}

/// Machine-readable failure returned in place of an error string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{}/{}: {message}", category.as_str(), code)]
pub struct LdpError {
    pub category: ErrorCategory,
    pub severity: Severity,
    pub retryable: bool,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_output: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationStatus {
    #[default]
    Unverified,
    SelfVerified,
    PeerVerified,
    ToolVerified,
    HumanVerified,
}

/// How a result was checked and which delegates handled it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default)]
    pub verification_status: VerificationStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence_refs: Vec<String>,
    /// First entry is the original delegator, last is the final producer.
    #[serde(default)]
    pub lineage: Vec<String>,
}

impl Provenance {
    /// Hops beyond the original delegator.
    pub fn depth(&self) -> usize {
        self.lineage.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSubmit {
    pub task_id: String,
    pub payload: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract: Option<DelegationContract>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskResult {
    pub task_id: String,
    pub output: String,
    pub tokens_used: u64,
    #[serde(with = "rust_decimal::serde::str")]
    pub cost_usd: Decimal,
    pub completed_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Any top-level protocol message. Kinds are told apart by their required
/// keys (`payload`, `output`, `delegate_id`), so the wire object carries no
/// type tag.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Message {
    TaskSubmit(TaskSubmit),
    TaskResult(TaskResult),
    IdentityCard(DelegateRecord),
}

impl From<TaskSubmit> for Message {
    fn from(m: TaskSubmit) -> Self {
        Message::TaskSubmit(m)
    }
}

impl From<TaskResult> for Message {
    fn from(m: TaskResult) -> Self {
        Message::TaskResult(m)
    }
}

impl From<DelegateRecord> for Message {
    fn from(m: DelegateRecord) -> Self {
        Message::IdentityCard(m)
    }
}
