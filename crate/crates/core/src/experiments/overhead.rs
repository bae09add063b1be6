use std::hint::black_box;
use std::time::Instant;

use chrono::{TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::contract::{apply_policy, check_result};
use crate::protocol::{encode_message, fixtures, Message};

pub const MIN_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub iterations: usize,
    pub bytes_without_contract: usize,
    pub bytes_with_contract: usize,
    pub byte_delta: usize,
    pub validation_ns_mean: f64,
    pub serialization_ns_mean: f64,
}

/// Mean wall time per call, in nanoseconds, after discarding the first 10%
/// of calls as warm-up.
fn time_per_call(iterations: usize, mut f: impl FnMut()) -> f64 {
    let warmup = iterations.div_ceil(10);
    for _ in 0..warmup {
        f();
    }
    let measured = iterations - warmup;
    let start = Instant::now();
    for _ in 0..measured {
        f();
    }
    start.elapsed().as_nanos() as f64 / measured as f64
}

pub fn run_overhead(iterations: usize) -> Result<OverheadReport, ExperimentError> {
    if iterations < MIN_ITERATIONS {
        return Err(ExperimentError::InvalidArgument(format!(
            "need at least {MIN_ITERATIONS} iterations, got {iterations}"
        )));
    }
    let bare: Message = fixtures::canonical_submit(false).into();
    let full: Message = fixtures::canonical_submit(true).into();
    let bytes_without_contract = encode_message(&bare).len();
    let bytes_with_contract = encode_message(&full).len();

    let contract = fixtures::quarterly_report_contract();
    let result = fixtures::over_budget_result();
    let received = Utc.with_ymd_and_hms(2026, 3, 15, 17, 45, 0).unwrap();

    let validation_ns_mean = time_per_call(iterations, || {
        let outcome = check_result(black_box(&contract), black_box(&result), received);
        let _ = black_box(apply_policy(outcome, result.clone()));
    });
    let serialization_ns_mean = time_per_call(iterations, || {
        black_box(encode_message(black_box(&full)));
    });

    Ok(OverheadReport {
        iterations,
        bytes_without_contract,
        bytes_with_contract,
        byte_delta: bytes_with_contract - bytes_without_contract,
        validation_ns_mean,
        serialization_ns_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_sizes_are_stable() {
        let a = run_overhead(1000).unwrap();
        let b = run_overhead(2000).unwrap();
        assert_eq!(a.bytes_with_contract, b.bytes_with_contract);
        assert!(a.bytes_with_contract > a.bytes_without_contract);
    }

    #[test]
    fn short_and_long_runs_agree_within_3x() {
        // Best of three damps scheduler noise from tests running in parallel.
        let contract = fixtures::quarterly_report_contract();
        let result = fixtures::over_budget_result();
        let received = Utc.with_ymd_and_hms(2026, 3, 15, 17, 45, 0).unwrap();
        let best = |iterations| {
            (0..3)
                .map(|_| {
                    time_per_call(iterations, || {
                        black_box(check_result(black_box(&contract), black_box(&result), received));
                    })
                })
                .fold(f64::INFINITY, f64::min)
        };
        let (short, long) = (best(1_000), best(100_000));
        assert!(short / long < 3.0 && long / short < 3.0, "{short} ns vs {long} ns");
    }

    #[test]
    fn too_few_iterations() {
        assert!(run_overhead(999).is_err());
    }
}
