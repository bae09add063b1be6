//! Routing experiments over simulated pools and the protocol overhead
//! benchmark.
//!
//! Every run is a pure function of its seed. Each seed feeds three
//! independent ChaCha streams: pool construction, blind routing draws and
//! task execution noise. All three conditions replay the same execution
//! stream, so two conditions that route a task to the same delegate observe
//! the same output for it.

mod e3;
mod overhead;
mod report;
mod sensitivity;

pub use e3::{run_condition, run_e3, run_e3_seeds, ConditionRun, E3Report, E3Summary};
pub use overhead::{run_overhead, OverheadReport, MIN_ITERATIONS};
pub use report::{write_csv, write_summary};
pub use sensitivity::{run_sensitivity, GridCellReport, InflationLevel, GRID_FRACTIONS, GRID_POOL_SIZES};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::router::RouteError;
use crate::sim::SimError;

/// Skill name used on every simulated claim.
pub const SIM_SKILL: &str = "reasoning";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("report output failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Uniform random routing.
    Blind,
    /// Argmax over self-reported quality.
    SelfClaimed,
    /// Argmax over issuer-attested quality only.
    Attested,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Blind, Condition::SelfClaimed, Condition::Attested];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Blind => "blind",
            Condition::SelfClaimed => "self_claimed",
            Condition::Attested => "attested",
        }
    }
}

/// One row of the per-condition routing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub tasks: usize,
    pub quality_mean: f64,
    /// Zero when fewer than two tasks ran; see `std_defined`.
    pub quality_std: f64,
    pub std_defined: bool,
    pub accuracy_pct: f64,
    pub inflation_selected_pct: f64,
    pub distinct_delegates: usize,
    pub d_vs_blind: Option<f64>,
    pub p_vs_blind: Option<f64>,
    pub d_vs_self_claimed: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Pool = 0,
    Routing = 1,
    Execution = 2,
}

pub(crate) fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
