use std::collections::BTreeMap;

use chrono::DateTime;
use serde::{Deserialize, Serialize};

use super::{stream_rng, Condition, ConditionReport, ExperimentError, Stream, SIM_SKILL};
use crate::protocol::{ClaimType, DelegateRecord};
use crate::router::{select, RoutingPolicy};
use crate::sim::{best_delegate, build_pool, execute_task, DelegatePool, DelegateProfile, PoolConfig};
use crate::stats::{cohens_d, descriptive, mann_whitney_u, StatsError};

/// Raw outcome of routing `tasks` tasks under one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRun {
    pub condition: Condition,
    pub outputs: Vec<f64>,
    pub selections: BTreeMap<String, usize>,
    pub to_best: usize,
    pub to_dishonest: usize,
}

impl ConditionRun {
    pub fn mean(&self) -> f64 {
        self.outputs.iter().sum::<f64>() / self.outputs.len() as f64
    }
}

pub fn run_condition(
    pool: &DelegatePool,
    condition: Condition,
    tasks: usize,
    seed: u64,
) -> Result<ConditionRun, ExperimentError> {
    let (records, policy): (Vec<DelegateRecord>, RoutingPolicy) = match condition {
        Condition::Blind => (
            pool.profiles.iter().map(|p| p.self_claimed_record(SIM_SKILL)).collect(),
            RoutingPolicy::blind(),
        ),
        Condition::SelfClaimed => (
            pool.profiles.iter().map(|p| p.self_claimed_record(SIM_SKILL)).collect(),
            RoutingPolicy::by_claims(SIM_SKILL, ClaimType::SelfClaimed),
        ),
        Condition::Attested => (
            pool.profiles.iter().map(|p| p.attested_record(SIM_SKILL)).collect(),
            RoutingPolicy::by_claims(SIM_SKILL, ClaimType::IssuerAttested),
        ),
    };
    // Simulated claims carry no timestamps, so any fixed instant works.
    let now = DateTime::UNIX_EPOCH;
    let best = best_delegate(&pool.profiles).unwrap_or_default();
    let mut routing = stream_rng(seed, Stream::Routing);
    let mut execution = stream_rng(seed, Stream::Execution);

    let mut run = ConditionRun {
        condition,
        outputs: Vec::with_capacity(tasks),
        selections: BTreeMap::new(),
        to_best: 0,
        to_dishonest: 0,
    };
    for _ in 0..tasks {
        let id = select(&records, &policy, &mut routing, now)?;
        let profile = pool.get(id).expect("records are built from the pool");
        run.outputs
            .push(execute_task(profile, pool.noise_sigma, &mut execution).q_output);
        *run.selections.entry(id.to_string()).or_default() += 1;
        run.to_best += usize::from(id == best);
        run.to_dishonest += usize::from(!profile.honest);
    }
    Ok(run)
}

fn d_or_marker(a: &[f64], b: &[f64]) -> Option<f64> {
    match cohens_d(a, b) {
        Ok(d) => Some(d),
        Err(StatsError::DegenerateVariance { marker }) => Some(marker),
        Err(StatsError::InsufficientData { .. }) => None,
    }
}

/// Outputs of `other` when it is a different condition from `me`.
fn vs(other: Option<&ConditionRun>, me: Condition) -> Option<&[f64]> {
    other.filter(|o| o.condition != me).map(|o| &o.outputs[..])
}

pub(crate) fn condition_reports(runs: &[ConditionRun]) -> Vec<ConditionReport> {
    let find = |c: Condition| runs.iter().find(|r| r.condition == c);
    let blind = find(Condition::Blind);
    let self_claimed = find(Condition::SelfClaimed);

    runs.iter()
        .map(|run| {
            let n = run.outputs.len();
            let pct = |k: usize| 100.0 * k as f64 / n as f64;
            let (quality_std, std_defined) = match descriptive(&run.outputs) {
                Ok((_, s)) => (s, true),
                Err(_) => (0.0, false),
            };
            let vs_blind = vs(blind, run.condition);
            ConditionReport {
                condition: run.condition,
                tasks: n,
                quality_mean: run.mean(),
                quality_std,
                std_defined,
                accuracy_pct: pct(run.to_best),
                inflation_selected_pct: pct(run.to_dishonest),
                distinct_delegates: run.selections.len(),
                d_vs_blind: vs_blind.and_then(|b| d_or_marker(&run.outputs, b)),
                p_vs_blind: vs_blind.and_then(|b| mann_whitney_u(&run.outputs, b).ok().map(|m| m.p)),
                d_vs_self_claimed: (run.condition == Condition::Attested)
                    .then(|| vs(self_claimed, run.condition))
                    .flatten()
                    .and_then(|s| d_or_marker(&run.outputs, s)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E3Report {
    pub seed: u64,
    pub tasks_per_condition: usize,
    pub pool: Vec<DelegateProfile>,
    pub conditions: Vec<ConditionReport>,
}

impl E3Report {
    pub fn condition(&self, c: Condition) -> &ConditionReport {
        self.conditions
            .iter()
            .find(|r| r.condition == c)
            .expect("every run reports all conditions")
    }
}

/// Routes `tasks_per_condition` tasks under each condition over the
/// ten-delegate pool with three inflators.
pub fn run_e3(seed: u64, tasks_per_condition: usize) -> Result<E3Report, ExperimentError> {
    if tasks_per_condition == 0 {
        return Err(ExperimentError::InvalidArgument(
            "tasks per condition must be at least 1".into(),
        ));
    }
    let pool = build_pool(&PoolConfig::e3(), &mut stream_rng(seed, Stream::Pool))?;
    let runs = Condition::ALL
        .iter()
        .map(|&c| run_condition(&pool, c, tasks_per_condition, seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(E3Report {
        seed,
        tasks_per_condition,
        pool: pool.profiles,
        conditions: condition_reports(&runs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E3Summary {
    pub seeds: Vec<u64>,
    /// Per-seed rows averaged field by field; `tasks` is the pooled count.
    pub averaged: Vec<ConditionReport>,
    pub per_seed: Vec<E3Report>,
}

impl E3Summary {
    pub fn condition(&self, c: Condition) -> &ConditionReport {
        self.averaged
            .iter()
            .find(|r| r.condition == c)
            .expect("every run reports all conditions")
    }
}

pub fn run_e3_seeds(seeds: &[u64], tasks_per_condition: usize) -> Result<E3Summary, ExperimentError> {
    if seeds.is_empty() {
        return Err(ExperimentError::InvalidArgument("need at least one seed".into()));
    }
    let per_seed = seeds
        .iter()
        .map(|&s| run_e3(s, tasks_per_condition))
        .collect::<Result<Vec<_>, _>>()?;
    let k = per_seed.len() as f64;
    let averaged = Condition::ALL
        .iter()
        .map(|&c| {
            let rows: Vec<&ConditionReport> = per_seed.iter().map(|r| r.condition(c)).collect();
            let avg = |f: fn(&ConditionReport) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / k;
            let avg_opt =
                |f: fn(&ConditionReport) -> Option<f64>| rows.iter().map(|r| f(r)).sum::<Option<f64>>().map(|s| s / k);
            ConditionReport {
                condition: c,
                tasks: rows.iter().map(|r| r.tasks).sum(),
                quality_mean: avg(|r| r.quality_mean),
                quality_std: avg(|r| r.quality_std),
                std_defined: rows.iter().all(|r| r.std_defined),
                accuracy_pct: avg(|r| r.accuracy_pct),
                inflation_selected_pct: avg(|r| r.inflation_selected_pct),
                distinct_delegates: rows.iter().map(|r| r.distinct_delegates).max().unwrap_or(0),
                d_vs_blind: avg_opt(|r| r.d_vs_blind),
                p_vs_blind: avg_opt(|r| r.p_vs_blind),
                d_vs_self_claimed: avg_opt(|r| r.d_vs_self_claimed),
            }
        })
        .collect();
    Ok(E3Summary {
        seeds: seeds.to_vec(),
        averaged,
        per_seed,
    })
}
