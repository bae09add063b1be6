//! Simulated delegate pools with known true quality.
//!
//! True qualities are evenly spaced over `q_true_range`, and delegate ids
//! are numbered from the strongest (`d00`) down. The dishonest delegates are
//! the weakest `round(pool_size * dishonest_fraction)` ones; their inflation
//! amounts are evenly spaced over `inflation_range`, smallest for the weakest
//! inflator, and claims are capped at 1.0. Honest delegates report their true
//! quality with a small uniform jitter.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{ClaimType, DelegateRecord, QualityClaim};

/// Half-width of the jitter on honest claims.
pub const HONEST_JITTER: f64 = 0.015;

/// Issuer named on the attested claims built from true quality.
pub const SIM_ISSUER: &str = "sim-evaluator";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelegateProfile {
    pub delegate_id: String,
    pub q_true: f64,
    pub q_claimed: f64,
    pub honest: bool,
}

impl DelegateProfile {
    /// Identity card with a single self-claim.
    pub fn self_claimed_record(&self, skill: &str) -> DelegateRecord {
        DelegateRecord::new(
            self.delegate_id.clone(),
            vec![QualityClaim::new(skill, self.q_claimed, ClaimType::SelfClaimed)],
        )
    }

    /// Identity card carrying the self-claim plus an attested claim equal to
    /// true quality.
    pub fn attested_record(&self, skill: &str) -> DelegateRecord {
        DelegateRecord::new(
            self.delegate_id.clone(),
            vec![
                QualityClaim::new(skill, self.q_claimed, ClaimType::SelfClaimed),
                QualityClaim::new(skill, self.q_true, ClaimType::IssuerAttested).with_issuer(SIM_ISSUER),
            ],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub pool_size: usize,
    pub dishonest_fraction: f64,
    pub inflation_range: (f64, f64),
    pub q_true_range: (f64, f64),
    pub noise_sigma: f64,
}

impl PoolConfig {
    /// Ten delegates, three inflating by 0.35 to 0.45.
    pub fn e3() -> Self {
        Self {
            pool_size: 10,
            dishonest_fraction: 0.3,
            inflation_range: (0.35, 0.45),
            q_true_range: (0.45, 0.95),
            noise_sigma: 0.05,
        }
    }

    /// Round-half-to-even of `pool_size * dishonest_fraction`.
    pub fn dishonest_count(&self) -> usize {
        ((self.pool_size as f64 * self.dishonest_fraction).round_ties_even() as usize).min(self.pool_size)
    }

    fn check(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::BadConfig(msg.to_string()));
        let (lo, hi) = self.q_true_range;
        let (inf_lo, inf_hi) = self.inflation_range;
        if self.pool_size < 2 {
            return bad("pool_size must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.dishonest_fraction) {
            return bad("dishonest_fraction must lie in [0, 1]");
        }
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return bad("q_true_range must be an ordered sub-interval of [0, 1]");
        }
        if !(0.0 < inf_lo && inf_lo <= inf_hi && inf_hi.is_finite()) {
            return bad("inflation_range must be positive and ordered");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise_sigma must be finite and non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("bad pool config: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolMetadata {
    pub dishonest_count: usize,
    /// Whether the top dishonest claim beats every honest claim.
    pub inflators_lead_claims: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelegatePool {
    pub profiles: Vec<DelegateProfile>,
    pub noise_sigma: f64,
    pub metadata: PoolMetadata,
}

impl DelegatePool {
    pub fn get(&self, delegate_id: &str) -> Option<&DelegateProfile> {
        self.profiles.iter().find(|p| p.delegate_id == delegate_id)
    }
}

fn evenly_spaced(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        (lo + hi) / 2.0
    } else {
        lo + i as f64 * (hi - lo) / (n - 1) as f64
    }
}

pub fn build_pool<R: Rng + ?Sized>(config: &PoolConfig, rng: &mut R) -> Result<DelegatePool, SimError> {
    config.check()?;
    let n = config.pool_size;
    let dishonest = config.dishonest_count();
    let width = ((n - 1).to_string().len()).max(2);
    let (lo, hi) = config.q_true_range;
    let (inf_lo, inf_hi) = config.inflation_range;

    let mut profiles = Vec::with_capacity(n);
    for i in 0..n {
        // Ids run from strongest to weakest; `rank` counts up from the weakest.
        let rank = n - 1 - i;
        let q_true = evenly_spaced(lo, hi, rank, n);
        let honest = rank >= dishonest;
        let q_claimed = if honest {
            (q_true + rng.random_range(-HONEST_JITTER..=HONEST_JITTER)).clamp(0.0, 1.0)
        } else {
            (q_true + evenly_spaced(inf_lo, inf_hi, rank, dishonest)).min(1.0)
        };
        if !honest && q_claimed <= q_true {
            return Err(SimError::BadConfig(format!(
                "delegate {i} has q_true {q_true} and cannot claim above it"
            )));
        }
        profiles.push(DelegateProfile {
            delegate_id: format!("d{i:0width$}"),
            q_true,
            q_claimed,
            honest,
        });
    }

    let top = |honest: bool| {
        profiles
            .iter()
            .filter(|p| p.honest == honest)
            .map(|p| p.q_claimed)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let metadata = PoolMetadata {
        dishonest_count: dishonest,
        inflators_lead_claims: dishonest > 0 && top(false) > top(true),
    };
    Ok(DelegatePool {
        profiles,
        noise_sigma: config.noise_sigma,
        metadata,
    })
}

/// Standard normal draw by Box–Muller, consuming exactly two uniforms.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - [0, 1) lies in (0, 1], keeping ln away from zero.
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub delegate_id: String,
    pub q_output: f64,
}

pub fn execute_task<R: Rng + ?Sized>(profile: &DelegateProfile, noise_sigma: f64, rng: &mut R) -> TaskOutcome {
    let noise = noise_sigma * standard_normal(rng);
    TaskOutcome {
        delegate_id: profile.delegate_id.clone(),
        q_output: (profile.q_true + noise).clamp(0.0, 1.0),
    }
}

/// Highest true quality; ties go to the smallest id.
pub fn best_delegate(profiles: &[DelegateProfile]) -> Option<&str> {
    profiles
        .iter()
        .reduce(|best, p| {
            if p.q_true > best.q_true || (p.q_true == best.q_true && p.delegate_id < best.delegate_id) {
                p
            } else {
                best
            }
        })
        .map(|p| p.delegate_id.as_str())
}
