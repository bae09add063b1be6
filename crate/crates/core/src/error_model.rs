//! Recovery semantics for typed failures.
//!
//! Each error category maps to exactly one (retryable, severity, action)
//! triple. This module only classifies; executing retries or reroutes is
//! left to callers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{ErrorCategory, LdpError, Severity};

pub const CONTRACT_VIOLATED: &str = "CONTRACT_VIOLATED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryAction {
    RetrySame,
    RetryBackoff,
    RerouteOtherDelegate,
    Escalate,
    SelectDifferentDelegate,
    AcceptWithWarning,
    AuthenticationFailure,
    ReestablishSession,
}

impl RecoveryAction {
    pub fn description(self) -> &'static str {
        match self {
            RecoveryAction::RetrySame => "retry on the same delegate",
            // Runtime failures may also be retried in place; rerouting covers
            // that case with a fresh delegate.
            RecoveryAction::RerouteOtherDelegate => "retry or reroute to another delegate",
            RecoveryAction::RetryBackoff => "retry with exponential backoff",
            RecoveryAction::Escalate => "escalate; contract violation",
            RecoveryAction::SelectDifferentDelegate => "select a different delegate",
            RecoveryAction::AcceptWithWarning => "accept with a quality warning",
            RecoveryAction::AuthenticationFailure => "authentication failure",
            RecoveryAction::ReestablishSession => "re-establish the session",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Semantics {
    pub retryable: bool,
    pub severity: Severity,
    pub action: RecoveryAction,
}

pub fn default_semantics(category: ErrorCategory) -> Semantics {
    use ErrorCategory::*;
    use RecoveryAction::*;
    let (retryable, severity, action) = match category {
        Runtime => (true, Severity::Error, RerouteOtherDelegate),
        Transport => (true, Severity::Warning, RetryBackoff),
        Policy => (false, Severity::Fatal, Escalate),
        Capability => (false, Severity::Error, SelectDifferentDelegate),
        Quality => (false, Severity::Warning, AcceptWithWarning),
        Identity => (false, Severity::Error, AuthenticationFailure),
        Session => (true, Severity::Error, ReestablishSession),
    };
    Semantics {
        retryable,
        severity,
        action,
    }
}

impl LdpError {
    /// Builds an error whose severity and retry flag follow its category.
    pub fn new(category: ErrorCategory, code: impl Into<String>, message: impl Into<String>) -> Self {
        let s = default_semantics(category);
        Self {
            category,
            severity: s.severity,
            retryable: s.retryable,
            code: code.into(),
            message: message.into(),
            partial_output: None,
        }
    }

    pub fn with_partial_output(mut self, output: impl Into<String>) -> Self {
        self.partial_output = Some(output.into());
        self
    }

    pub fn recovery(&self) -> RecoveryAction {
        default_semantics(self.category).action
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("a contract violation error needs at least one violation")]
pub struct NoViolations;

/// Wraps one or more contract violations into a fatal policy error that
/// carries the delegate's output.
pub fn make_contract_violation(violations: &[String], partial: impl Into<String>) -> Result<LdpError, NoViolations> {
    if violations.is_empty() {
        return Err(NoViolations);
    }
    let message = format!("contract violated ({}): {}", violations.len(), violations.join("; "));
    Ok(LdpError::new(ErrorCategory::Policy, CONTRACT_VIOLATED, message).with_partial_output(partial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Validate;

    #[test]
    fn table_rows() {
        use ErrorCategory::*;
        let rows = [
            (Runtime, true, Severity::Error, RecoveryAction::RerouteOtherDelegate),
            (Transport, true, Severity::Warning, RecoveryAction::RetryBackoff),
            (Policy, false, Severity::Fatal, RecoveryAction::Escalate),
            (
                Capability,
                false,
                Severity::Error,
                RecoveryAction::SelectDifferentDelegate,
            ),
            (Quality, false, Severity::Warning, RecoveryAction::AcceptWithWarning),
            (Identity, false, Severity::Error, RecoveryAction::AuthenticationFailure),
            (Session, true, Severity::Error, RecoveryAction::ReestablishSession),
        ];
        for (cat, retryable, severity, action) in rows {
            assert_eq!(
                default_semantics(cat),
                Semantics {
                    retryable,
                    severity,
                    action
                },
                "{cat:?}"
            );
        }
    }

    #[test]
    fn constructed_errors_are_consistent() {
        for cat in ErrorCategory::ALL {
            let e = LdpError::new(cat, "X", "y");
            assert!(e.validate_invariants().is_empty());
        }
    }

    #[test]
    fn single_violation_keeps_output() {
        let e = make_contract_violation(&["budget_tokens: 8200 > 6000".into()], "the summary").unwrap();
        assert_eq!(e.category, ErrorCategory::Policy);
        assert_eq!(e.severity, Severity::Fatal);
        assert!(!e.retryable);
        assert_eq!(e.code, CONTRACT_VIOLATED);
        assert_eq!(e.partial_output.as_deref(), Some("the summary"));
        assert_eq!(e.recovery(), RecoveryAction::Escalate);
    }

    #[test]
    fn message_lists_every_violation() {
        let e = make_contract_violation(&["budget_tokens exceeded".into(), "deadline missed".into()], "").unwrap();
        assert!(e.message.contains("budget_tokens exceeded"));
        assert!(e.message.contains("deadline missed"));
    }

    #[test]
    fn empty_violations_rejected() {
        assert_eq!(make_contract_violation(&[], "x"), Err(NoViolations));
    }
}
