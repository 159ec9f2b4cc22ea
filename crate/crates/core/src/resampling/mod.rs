//! Bootstrap confidence intervals and Monte-Carlo simulated reference values.
//!
//! Replicate `i` always draws from its own RNG seeded with
//! [`derive_replicate_seed`]`(master, i)` and results are collected in
//! replicate order, so serial and parallel runs agree bit for bit.

mod bootstrap;
mod seed;
mod simulate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bootstrap::{
    bca_interval, bootstrap_ci, bootstrap_replicates, jackknife_values, paired_resample, paired_resample_indices,
    percentile_interval, BootstrapOptions, GROUPED_JACKKNIFE_ABOVE, JACKKNIFE_GROUPS,
};
pub use seed::{derive_replicate_seed, derive_stream_seed};
pub use simulate::{simulate_reference, simulate_reference_for, McOptions, ReferenceSummary, SimulatedReference};

/// Whether replicate loops run on the rayon pool or on the calling thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Serial => (0..n).map(f).collect(),
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Like [`Execution::map`] for fallible work; the error of the lowest
    /// failing index is returned, wrapped with that index.
    pub fn try_map<T, F>(self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.map(n, f)
            .into_iter()
            .enumerate()
            .map(|(index, r)| {
                r.map_err(|e| Error::ReplicateFailed {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Bca,
    Percentile,
    McQuantile,
    /// Least-squares estimate ± t-quantile × standard error.
    Regression,
    /// Point estimate ± normal quantile × bootstrap standard deviation.
    BootstrapSe,
}

/// A statistic with its confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    /// Mean of replicates minus the point value.
    pub bias: f64,
    pub method: IntervalMethod,
    pub replicates: usize,
    /// Replicates collapsed to a single value.
    #[serde(default)]
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl IntervalEstimate {
    /// Interval from known bounds, e.g. values copied from a table.
    pub fn from_bounds(point: f64, lower: f64, upper: f64, method: IntervalMethod) -> Self {
        Self {
            point,
            lower,
            upper,
            level: 0.95,
            bias: 0.0,
            method,
            replicates: 0,
            degenerate: lower == upper,
            warnings: Vec::new(),
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Mean and sample standard deviation (n − 1 denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}
