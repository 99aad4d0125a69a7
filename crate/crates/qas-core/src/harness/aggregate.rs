//! Cross-seed aggregation of run summaries into per-interval ranges.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::logs::read_summary;
use super::run::RunSummary;
use super::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateInterval {
    pub interval: usize,
    pub runs: usize,
    pub mean_success_probability: f64,
    pub min_success_probability: f64,
    pub max_success_probability: f64,
    pub mean_optimal_successes: f64,
    pub min_optimal_successes: u64,
    pub max_optimal_successes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub intervals: Vec<AggregateInterval>,
}

pub fn aggregate_summaries(summaries: &[RunSummary]) -> Result<Aggregate, HarnessError> {
    let Some(first) = summaries.first() else {
        return Err(HarnessError::Config(vec!["aggregate: no summaries given".to_string()]));
    };
    let n_intervals = first.intervals.len();
    if summaries.iter().any(|s| s.intervals.len() != n_intervals) {
        return Err(HarnessError::Config(vec![
            "aggregate: summaries have differing interval counts".to_string(),
        ]));
    }
    let intervals = (0..n_intervals)
        .map(|i| {
            let probs: Vec<f64> = summaries.iter().map(|s| s.intervals[i].success_probability).collect();
            let optimal: Vec<u64> = summaries.iter().map(|s| s.intervals[i].optimal_successes).collect();
            AggregateInterval {
                interval: i,
                runs: summaries.len(),
                mean_success_probability: probs.iter().sum::<f64>() / probs.len() as f64,
                min_success_probability: probs.iter().copied().fold(f64::INFINITY, f64::min),
                max_success_probability: probs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean_optimal_successes: optimal.iter().sum::<u64>() as f64 / optimal.len() as f64,
                min_optimal_successes: *optimal.iter().min().unwrap(),
                max_optimal_successes: *optimal.iter().max().unwrap(),
            }
        })
        .collect();
    Ok(Aggregate { runs: summaries.len(), intervals })
}

pub fn aggregate_files(paths: &[impl AsRef<Path>]) -> Result<Aggregate, HarnessError> {
    let summaries: Vec<RunSummary> =
        paths.iter().map(read_summary).collect::<Result<_, _>>()?;
    aggregate_summaries(&summaries)
}

impl std::fmt::Display for Aggregate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} run(s) aggregated", self.runs)?;
        writeln!(
            f,
            "{:<9} {:>10} {:>10} {:>10} {:>12} {:>9} {:>9}",
            "interval", "mean_succ", "min_succ", "max_succ", "mean_optimal", "min_opt", "max_opt"
        )?;
        for iv in &self.intervals {
            writeln!(
                f,
                "{:<9} {:>10.4} {:>10.4} {:>10.4} {:>12.1} {:>9} {:>9}",
                iv.interval,
                iv.mean_success_probability,
                iv.min_success_probability,
                iv.max_success_probability,
                iv.mean_optimal_successes,
                iv.min_optimal_successes,
                iv.max_optimal_successes
            )?;
        }
        Ok(())
    }
}
