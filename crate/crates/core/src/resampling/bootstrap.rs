use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{derive_replicate_seed, mean_sd, Execution, IntervalEstimate, IntervalMethod};
use crate::error::{Error, Result};
use crate::generative::rng_from_seed;
use crate::stats::{quantile_sorted, PairedSample, StatisticKind};

/// Above this size the jackknife leaves out groups instead of single points.
pub const GROUPED_JACKKNIFE_ABOVE: usize = 20_000;
pub const JACKKNIFE_GROUPS: usize = 200;
const MIN_REPLICATES: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl BootstrapOptions {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            level: 0.95,
            seed,
            execution: Execution::Parallel,
        }
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self::new(1000, 0)
    }
}

pub fn paired_resample_indices<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<usize> {
    (0..m).map(|_| rng.random_range(0..m)).collect()
}

/// The bootstrap resample used for replicate `index` under `seed`.
pub fn paired_resample(sample: &PairedSample, seed: u64, index: u64) -> PairedSample {
    let mut rng = rng_from_seed(derive_replicate_seed(seed, index));
    sample.select(&paired_resample_indices(sample.len(), &mut rng))
}

/// Statistic values over `b` paired resamples, in replicate order.
pub fn bootstrap_replicates(
    sample: &PairedSample,
    stat: &StatisticKind,
    b: usize,
    seed: u64,
    execution: Execution,
) -> Result<Vec<f64>> {
    execution.try_map(b, |i| stat.evaluate(&paired_resample(sample, seed, i as u64)))
}

/// Leave-one-out values of the statistic, or leave-one-group-out with
/// [`JACKKNIFE_GROUPS`] interleaved groups for samples above
/// [`GROUPED_JACKKNIFE_ABOVE`] points.
pub fn jackknife_values(sample: &PairedSample, stat: &StatisticKind, execution: Execution) -> Result<Vec<f64>> {
    let m = sample.len();
    let groups = if m > GROUPED_JACKKNIFE_ABOVE {
        JACKKNIFE_GROUPS
    } else {
        m
    };
    execution.try_map(groups, |g| {
        let keep: Vec<usize> = (0..m).filter(|i| i % groups != g).collect();
        stat.evaluate(&sample.select(&keep))
    })
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

pub fn percentile_interval(point: f64, replicates: &[f64], level: f64) -> IntervalEstimate {
    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    let (mean, _) = mean_sd(replicates);
    IntervalEstimate {
        point,
        lower: quantile_sorted(&sorted, alpha / 2.0),
        upper: quantile_sorted(&sorted, 1.0 - alpha / 2.0),
        level,
        bias: mean - point,
        method: IntervalMethod::Percentile,
        replicates: replicates.len(),
        degenerate: false,
        warnings: Vec::new(),
    }
}

/// BCa interval from bootstrap replicates and jackknife values.
///
/// Falls back to the percentile interval when the bias correction is
/// infinite (all replicates on one side of `point`) or the acceleration
/// pushes an adjusted level outside (0, 1).
pub fn bca_interval(point: f64, replicates: &[f64], jackknife: &[f64], level: f64) -> IntervalEstimate {
    let b = replicates.len();
    let (mean, _) = mean_sd(replicates);
    let lo = replicates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = replicates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return IntervalEstimate {
            point,
            lower: point,
            upper: point,
            level,
            bias: mean - point,
            method: IntervalMethod::Bca,
            replicates: b,
            degenerate: true,
            warnings: vec!["bootstrap replicates are all identical; interval collapsed".into()],
        };
    }

    let normal = std_normal();
    let below = replicates.iter().filter(|&&r| r < point).count() as f64;
    let ties = replicates.iter().filter(|&&r| r == point).count() as f64;
    let fraction = (below + 0.5 * ties) / b as f64;
    let z0 = normal.inverse_cdf(fraction);

    let fallback = |why: &str| {
        let mut iv = percentile_interval(point, replicates, level);
        let msg = format!("BCa unavailable ({why}); using percentile interval");
        log::warn!("{msg}");
        iv.warnings.push(msg);
        iv
    };
    if !z0.is_finite() {
        return fallback("all replicates on one side of the estimate");
    }

    let (jmean, _) = mean_sd(jackknife);
    let (mut num, mut den) = (0.0, 0.0);
    for v in jackknife {
        let d = jmean - v;
        num += d * d * d;
        den += d * d;
    }
    let accel = if den > 0.0 { num / (6.0 * den.powf(1.5)) } else { 0.0 };

    let alpha = 1.0 - level;
    let adjust = |z: f64| {
        let s = z0 + z;
        let denom = 1.0 - accel * s;
        if denom <= 0.0 {
            None
        } else {
            Some(normal.cdf(z0 + s / denom))
        }
    };
    let (Some(p_lo), Some(p_hi)) = (
        adjust(normal.inverse_cdf(alpha / 2.0)),
        adjust(normal.inverse_cdf(1.0 - alpha / 2.0)),
    ) else {
        return fallback("acceleration out of range");
    };

    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    IntervalEstimate {
        point,
        lower: quantile_sorted(&sorted, p_lo),
        upper: quantile_sorted(&sorted, p_hi),
        level,
        bias: mean - point,
        method: IntervalMethod::Bca,
        replicates: b,
        degenerate: false,
        warnings: Vec::new(),
    }
}

/// BCa bootstrap confidence interval of `stat` on `sample`, resampling
/// (E, u) pairs jointly.
pub fn bootstrap_ci(
    sample: &PairedSample,
    stat: &StatisticKind,
    options: &BootstrapOptions,
) -> Result<IntervalEstimate> {
    if options.replicates < MIN_REPLICATES {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_REPLICATES} bootstrap replicates are required, got {}",
            options.replicates
        )));
    }
    if !(options.level > 0.0 && options.level < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "confidence level must lie in (0, 1), got {}",
            options.level
        )));
    }
    let point = stat.evaluate(sample)?;
    let reps = bootstrap_replicates(sample, stat, options.replicates, options.seed, options.execution)?;
    let lo = reps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = reps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let jack = if lo == hi {
        Vec::new()
    } else {
        jackknife_values(sample, stat, options.execution)?
    };
    Ok(bca_interval(point, &reps, &jack, options.level))
}
