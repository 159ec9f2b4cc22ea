use serde::{Deserialize, Serialize};

use super::{derive_replicate_seed, mean_sd, Execution, IntervalEstimate, IntervalMethod};
use crate::error::{Error, Result};
use crate::generative::{rng_from_seed, synth_errors_with, GenerativeSpec};
use crate::stats::{quantile_sorted, PairedSample, StatisticKind};

const MIN_MC: usize = 100;

#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub n_mc: usize,
    pub seed: u64,
    pub level: f64,
    pub execution: Execution,
}

impl McOptions {
    pub fn new(n_mc: usize, seed: u64) -> Self {
        Self {
            n_mc,
            seed,
            level: 0.95,
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

/// Monte-Carlo reference value of a statistic for ideally calibrated errors
/// drawn from the actual uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedReference {
    pub mean: f64,
    /// sd(replicates) / sqrt(N_MC)
    pub standard_error: f64,
    /// Empirical quantile interval of the replicates, centered on `mean`.
    pub interval: IntervalEstimate,
    pub replicates: Vec<f64>,
    pub generative: GenerativeSpec,
}

/// [`SimulatedReference`] without the replicate vector, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub generative: GenerativeSpec,
    pub mean: f64,
    pub standard_error: f64,
    pub n_mc: usize,
    pub interval: IntervalEstimate,
}

impl SimulatedReference {
    pub fn n_mc(&self) -> usize {
        self.replicates.len()
    }

    pub fn summary(&self) -> ReferenceSummary {
        ReferenceSummary {
            generative: self.generative,
            mean: self.mean,
            standard_error: self.standard_error,
            n_mc: self.n_mc(),
            interval: self.interval.clone(),
        }
    }
}

pub fn simulate_reference(
    uncertainties: &[f64],
    stat: &StatisticKind,
    d: GenerativeSpec,
    options: &McOptions,
) -> Result<SimulatedReference> {
    // the errors of the template are never read
    let template = PairedSample::new(uncertainties.to_vec(), uncertainties.to_vec())?;
    simulate_reference_for(&template, stat, d, options)
}

/// Simulated reference keeping the uncertainties and feature columns of
/// `template`; its errors are replaced in every replicate.
fn canonical_order(sample: &PairedSample) -> PairedSample {
    let u = sample.uncertainties();
    let features = sample.features();
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| {
        features
            .iter()
            .fold(u[a].total_cmp(&u[b]), |o, f| o.then(f[a].total_cmp(&f[b])))
    });
    sample.select(&order)
}

pub fn simulate_reference_for(
    template: &PairedSample,
    stat: &StatisticKind,
    d: GenerativeSpec,
    options: &McOptions,
) -> Result<SimulatedReference> {
    if options.n_mc < MIN_MC {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_MC} Monte-Carlo replicates are required, got {}",
            options.n_mc
        )));
    }
    // Canonical row order makes the result independent of how the input
    // rows happen to be ordered.
    let template = &canonical_order(template);
    let prepared = stat.prepare(template)?;
    let u = template.uncertainties();
    let replicates = options.execution.try_map(options.n_mc, |i| {
        let mut rng = rng_from_seed(derive_replicate_seed(options.seed, i as u64));
        let errors = synth_errors_with(u, d, &mut rng);
        prepared.evaluate(&template.with_errors(errors))
    })?;

    let (mean, sd) = mean_sd(&replicates);
    let mut sorted = replicates.clone();
    sorted.sort_by(f64::total_cmp);
    let alpha = 1.0 - options.level;
    let interval = IntervalEstimate {
        point: mean,
        lower: quantile_sorted(&sorted, alpha / 2.0),
        upper: quantile_sorted(&sorted, 1.0 - alpha / 2.0),
        level: options.level,
        bias: 0.0,
        method: IntervalMethod::McQuantile,
        replicates: replicates.len(),
        degenerate: sorted[0] == sorted[sorted.len() - 1],
        warnings: Vec::new(),
    };
    Ok(SimulatedReference {
        mean,
        standard_error: sd / (replicates.len() as f64).sqrt(),
        interval,
        replicates,
        generative: d,
    })
}
