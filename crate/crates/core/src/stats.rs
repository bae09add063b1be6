//! Descriptive statistics, Cohen's d and the Mann-Whitney U test.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    /// Zero pooled spread with different means; `marker` is the signed infinity.
    #[error("pooled standard deviation is zero but means differ")]
    DegenerateVariance { marker: f64 },
}

fn require(x: &[f64], needed: usize) -> Result<(), StatsError> {
    if x.len() < needed {
        Err(StatsError::InsufficientData { needed, got: x.len() })
    } else {
        Ok(())
    }
}

pub fn mean(x: &[f64]) -> Result<f64, StatsError> {
    require(x, 1)?;
    Ok(x.iter().sum::<f64>() / x.len() as f64)
}

/// Sample variance (n - 1 denominator).
pub fn variance(x: &[f64]) -> Result<f64, StatsError> {
    require(x, 2)?;
    let m = mean(x)?;
    Ok(x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64)
}

/// Mean and sample standard deviation.
pub fn descriptive(x: &[f64]) -> Result<(f64, f64), StatsError> {
    Ok((mean(x)?, variance(x)?.sqrt()))
}

/// Signed standardized mean difference of `a` minus `b` over the pooled
/// standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    require(a, 2)?;
    require(b, 2)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let diff = mean(a)? - mean(b)?;
    let pooled = (((na - 1.0) * variance(a)? + (nb - 1.0) * variance(b)?) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        return if diff == 0.0 {
            Ok(0.0)
        } else {
            Err(StatsError::DegenerateVariance {
                marker: f64::INFINITY.copysign(diff),
            })
        };
    }
    Ok(diff / pooled)
}

/// Midranks (1-based) of `values`, plus the size of every tie group.
pub fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end share ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// Rank-sum statistic of the first sample.
    pub u: f64,
    /// Two-sided, normal approximation with continuity and tie corrections.
    pub p: f64,
}

/// Variance of U under the null hypothesis, corrected for ties.
pub fn u_null_variance(na: usize, nb: usize, tie_groups: &[usize]) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    let n = na + nb;
    let tie_term: f64 = tie_groups
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    require(a, 3)?;
    require(b, 3)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let na = a.len() as f64;
    let rank_sum: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum - na * (na + 1.0) / 2.0;

    let mu = na * b.len() as f64 / 2.0;
    let sigma = u_null_variance(a.len(), b.len(), &ties).sqrt();
    let p = if sigma == 0.0 {
        1.0
    } else {
        let z = ((u - mu).abs() - 0.5).max(0.0) / sigma;
        erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
    };
    Ok(MannWhitney { u, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub mean_a: f64,
    pub mean_b: f64,
    pub std_a: f64,
    pub std_b: f64,
    pub cohens_d: f64,
    pub u_statistic: f64,
    pub p_value: f64,
}

/// Everything needed to compare sample `a` against baseline `b`. A
/// degenerate Cohen's d is reported as its signed infinity.
pub fn compare(a: &[f64], b: &[f64]) -> Result<ComparisonStats, StatsError> {
    let (mean_a, std_a) = descriptive(a)?;
    let (mean_b, std_b) = descriptive(b)?;
    let d = match cohens_d(a, b) {
        Ok(d) => d,
        Err(StatsError::DegenerateVariance { marker }) => marker,
        Err(e) => return Err(e),
    };
    let mw = mann_whitney_u(a, b)?;
    Ok(ComparisonStats {
        mean_a,
        mean_b,
        std_a,
        std_b,
        cohens_d: d,
        u_statistic: mw.u,
        p_value: mw.p,
    })
}
