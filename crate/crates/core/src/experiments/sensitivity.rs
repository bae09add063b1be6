use serde::{Deserialize, Serialize};

use super::e3::run_condition;
use super::{stream_rng, Condition, ExperimentError, Stream};
use crate::sim::{build_pool, PoolConfig};

pub const GRID_FRACTIONS: [f64; 4] = [0.1, 0.3, 0.5, 0.7];
pub const GRID_POOL_SIZES: [usize; 3] = [5, 10, 20];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InflationLevel {
    Low,
    Medium,
    High,
}

impl InflationLevel {
    pub const ALL: [InflationLevel; 3] = [InflationLevel::Low, InflationLevel::Medium, InflationLevel::High];

    pub fn range(self) -> (f64, f64) {
        match self {
            InflationLevel::Low => (0.10, 0.15),
            InflationLevel::Medium => (0.25, 0.35),
            InflationLevel::High => (0.40, 0.50),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCellReport {
    pub dishonest_fraction: f64,
    pub inflation_level: InflationLevel,
    pub pool_size: usize,
    pub dishonest_count: usize,
    pub blind_mean: f64,
    pub self_claimed_mean: f64,
    pub attested_mean: f64,
    /// Self-claimed routing did worse than blind routing.
    pub paradox: bool,
}

/// Runs the 4 x 3 x 3 grid of dishonest fraction, inflation level and pool
/// size. Each cell averages per-condition quality over `seeds`.
pub fn run_sensitivity(seeds: &[u64], tasks_per_condition: usize) -> Result<Vec<GridCellReport>, ExperimentError> {
    if seeds.is_empty() {
        return Err(ExperimentError::InvalidArgument("need at least one seed".into()));
    }
    if tasks_per_condition == 0 {
        return Err(ExperimentError::InvalidArgument(
            "tasks per condition must be at least 1".into(),
        ));
    }
    let mut cells = Vec::with_capacity(36);
    for fraction in GRID_FRACTIONS {
        for level in InflationLevel::ALL {
            for size in GRID_POOL_SIZES {
                let config = PoolConfig {
                    pool_size: size,
                    dishonest_fraction: fraction,
                    inflation_range: level.range(),
                    ..PoolConfig::e3()
                };
                cells.push(run_cell(&config, level, seeds, tasks_per_condition)?);
            }
        }
    }
    Ok(cells)
}

fn run_cell(
    config: &PoolConfig,
    level: InflationLevel,
    seeds: &[u64],
    tasks: usize,
) -> Result<GridCellReport, ExperimentError> {
    let mut sums = [0.0; 3];
    for &seed in seeds {
        let pool = build_pool(config, &mut stream_rng(seed, Stream::Pool))?;
        for (slot, condition) in sums.iter_mut().zip(Condition::ALL) {
            *slot += run_condition(&pool, condition, tasks, seed)?.mean();
        }
    }
    let k = seeds.len() as f64;
    let [blind_mean, self_claimed_mean, attested_mean] = sums.map(|s| s / k);
    Ok(GridCellReport {
        dishonest_fraction: config.dishonest_fraction,
        inflation_level: level,
        pool_size: config.pool_size,
        dishonest_count: config.dishonest_count(),
        blind_mean,
        self_claimed_mean,
        attested_mean,
        paradox: self_claimed_mean < blind_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_inflators_no_paradox() {
        let cells = run_sensitivity(&[1, 2], 50).unwrap();
        assert_eq!(cells.len(), 36);
        let cell = cells
            .iter()
            .find(|c| c.pool_size == 5 && c.dishonest_fraction == 0.1 && c.inflation_level == InflationLevel::High)
            .unwrap();
        assert_eq!(cell.dishonest_count, 0);
        assert!(!cell.paradox);
        // Both claim-based conditions pick the same honest delegate and share noise.
        assert_eq!(cell.self_claimed_mean, cell.attested_mean);
    }

    #[test]
    fn paradox_flag_matches_means() {
        for c in run_sensitivity(&[3], 20).unwrap() {
            assert_eq!(c.paradox, c.self_claimed_mean < c.blind_mean);
        }
    }

    #[test]
    fn rejects_empty_seed_list() {
        assert!(run_sensitivity(&[], 10).is_err());
    }
}
