//! Delegate selection under blind or claim-based routing.
//!
//! Claim-based routing filters claims by skill, minimum trust level and
//! freshness, then takes the argmax of the surviving values. A policy whose
//! minimum is `issuer_attested` or above never looks at self-claims.

use chrono::Duration;
use rand::Rng;
use thiserror::Error;

use crate::protocol::{ClaimType, DelegateRecord, QualityClaim, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Uniform random choice; every other policy field is ignored.
    Blind,
    ByClaims,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingPolicy {
    pub strategy: Strategy,
    pub min_claim_type: ClaimType,
    pub skill: String,
    pub max_staleness: Option<Duration>,
}

impl RoutingPolicy {
    pub fn blind() -> Self {
        Self {
            strategy: Strategy::Blind,
            min_claim_type: ClaimType::SelfClaimed,
            skill: String::new(),
            max_staleness: None,
        }
    }

    pub fn by_claims(skill: impl Into<String>, min_claim_type: ClaimType) -> Self {
        Self {
            strategy: Strategy::ByClaims,
            min_claim_type,
            skill: skill.into(),
            max_staleness: None,
        }
    }

    pub fn max_staleness(mut self, window: Duration) -> Self {
        self.max_staleness = Some(window);
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RouteError {
    #[error("cannot route over an empty pool")]
    EmptyPool,
    #[error("no delegate has an eligible {min:?} claim for skill {skill:?}")]
    NoEligibleDelegate { skill: String, min: ClaimType },
}

/// The most trusted claim on `policy.skill` that clears the policy's filters.
pub fn eligible_claim<'a>(
    record: &'a DelegateRecord,
    policy: &RoutingPolicy,
    now: Timestamp,
) -> Option<&'a QualityClaim> {
    record
        .claims
        .iter()
        .filter(|c| c.skill == policy.skill)
        .filter(|c| c.trust_level() >= policy.min_claim_type)
        .filter(|c| is_fresh(c, policy.max_staleness, now))
        .max_by_key(|c| c.trust_level())
}

fn is_fresh(claim: &QualityClaim, max_staleness: Option<Duration>, now: Timestamp) -> bool {
    match (max_staleness, claim.observed_at) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(window), Some(at)) => now - at <= window,
    }
}

/// Picks one delegate id from `pool`.
///
/// Claim-based routing never touches `rng`; ties go to the lexicographically
/// smallest delegate id.
pub fn select<'a, R: Rng + ?Sized>(
    pool: &'a [DelegateRecord],
    policy: &RoutingPolicy,
    rng: &mut R,
    now: Timestamp,
) -> Result<&'a str, RouteError> {
    if pool.is_empty() {
        return Err(RouteError::EmptyPool);
    }
    match policy.strategy {
        Strategy::Blind => Ok(&pool[rng.random_range(0..pool.len())].delegate_id),
        Strategy::ByClaims => {
            let mut best: Option<(&str, f64)> = None;
            for record in pool {
                let Some(claim) = eligible_claim(record, policy, now) else {
                    continue;
                };
                let id = record.delegate_id.as_str();
                let better = match best {
                    None => true,
                    Some((best_id, best_value)) => {
                        claim.value > best_value || (claim.value == best_value && id < best_id)
                    }
                };
                if better {
                    best = Some((id, claim.value));
                }
            }
            best.map(|(id, _)| id).ok_or_else(|| RouteError::NoEligibleDelegate {
                skill: policy.skill.clone(),
                min: policy.min_claim_type,
            })
        }
    }
}
