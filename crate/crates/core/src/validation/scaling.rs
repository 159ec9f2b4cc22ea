//! Dependence of simulated ENCE/ZMSE references on dataset size, bin count
//! and uncertainty distribution, fitted against (N/M)^{1/2}.

use serde::{Deserialize, Serialize};

use super::regression::{ols, t_quantile, weighted_fit, LinearFit};
use crate::error::{Error, Result};
use crate::generative::{gen_synthetic_with_rng, rng_from_seed, SyntheticModel, SyntheticModelSpec};
use crate::resampling::{
    derive_replicate_seed, derive_stream_seed, mean_sd, Execution, IntervalEstimate, IntervalMethod,
};
use crate::stats::{ence_with_layout, zmse_with_layout, BinLayout, BinningConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingDesign {
    pub m_grid: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub nu_grid: Vec<f64>,
}

impl Default for ScalingDesign {
    /// M ∈ {2000, 4000, 8000, 12000, 16000}, N ∈ {10, ..., 50},
    /// ν ∈ {3, 4, 5, 6, 12, 24}.
    fn default() -> Self {
        Self {
            m_grid: vec![2000, 4000, 8000, 12000, 16000],
            n_grid: vec![10, 20, 30, 40, 50],
            nu_grid: vec![3.0, 4.0, 5.0, 6.0, 12.0, 24.0],
        }
    }
}

impl ScalingDesign {
    /// M ∈ {2000, 8000, 16000}, N ∈ {10, 30, 50}, ν ∈ {6, 24}.
    pub fn reduced() -> Self {
        Self {
            m_grid: vec![2000, 8000, 16000],
            n_grid: vec![10, 30, 50],
            nu_grid: vec![6.0, 24.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub m: usize,
    pub n: usize,
    pub nu: f64,
    /// (N/M)^{1/2}
    pub x: f64,
    pub mean: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub statistic: String,
    pub model: SyntheticModel,
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept_interval: Option<IntervalEstimate>,
    pub fit_through_origin: bool,
    /// Exponent β of M in mean = α M^β N^{1/2}, fitted in log space;
    /// absent when the design has a single M.
    pub m_exponent: Option<f64>,
    pub m_exponent_se: Option<f64>,
    /// Weighted residuals (residual / se) of the linear fit.
    pub standardized_residuals: Vec<f64>,
    pub reduced_chi2: f64,
    /// Median of se/mean across design points.
    pub median_relative_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub model: SyntheticModel,
    pub n_mc: usize,
    pub seed: u64,
    pub design: ScalingDesign,
    pub ence: ScalingFit,
    pub zmse: ScalingFit,
}

#[derive(Debug, Clone, Copy)]
pub struct ScalingOptions {
    pub n_mc: usize,
    pub seed: u64,
    pub level: f64,
    /// `None` picks through-origin for NIG and free intercept for T6IG.
    pub through_origin: Option<bool>,
    pub execution: Execution,
}

impl ScalingOptions {
    pub fn new(n_mc: usize, seed: u64) -> Self {
        Self {
            n_mc,
            seed,
            level: 0.95,
            through_origin: None,
            execution: Execution::Parallel,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Simulates N_MC calibrated datasets per (M, ν) from `model`, evaluates
/// ENCE and ZMSE for every N on the same datasets, and fits the mean values
/// against (N/M)^{1/2} with weights 1/se².
pub fn scaling_study(model: SyntheticModel, design: &ScalingDesign, options: &ScalingOptions) -> Result<ScalingStudy> {
    if design.m_grid.is_empty() || design.n_grid.is_empty() || design.nu_grid.is_empty() {
        return Err(Error::InvalidConfig("scaling grids must be non-empty".into()));
    }
    if options.n_mc < 2 {
        return Err(Error::InvalidConfig("scaling study needs at least 2 replicates".into()));
    }
    for &m in &design.m_grid {
        for &n in &design.n_grid {
            BinningConfig::new(n).check(m)?;
        }
    }

    let mut ence_points = Vec::new();
    let mut zmse_points = Vec::new();
    let mut cell = 0u64;
    for &m in &design.m_grid {
        for &nu in &design.nu_grid {
            let spec = SyntheticModelSpec::new(model, nu, m)?;
            let stream = derive_stream_seed(options.seed, cell);
            cell += 1;
            // per replicate: (ENCE, ZMSE) for each N
            let per_rep = options.execution.try_map(options.n_mc, |r| {
                let mut rng = rng_from_seed(derive_replicate_seed(stream, r as u64));
                let sample = gen_synthetic_with_rng(&spec, &mut rng);
                let u = sample.uncertainties();
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
                design
                    .n_grid
                    .iter()
                    .map(|&n| {
                        let layout = BinLayout::from_sorted_order(order.clone(), n)?;
                        Ok((ence_with_layout(&sample, &layout), zmse_with_layout(&sample, &layout)?))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (j, &n) in design.n_grid.iter().enumerate() {
                let x = (n as f64 / m as f64).sqrt();
                let point = |values: Vec<f64>| {
                    let (mean, sd) = mean_sd(&values);
                    ScalingPoint {
                        m,
                        n,
                        nu,
                        x,
                        mean,
                        standard_error: sd / (values.len() as f64).sqrt(),
                    }
                };
                ence_points.push(point(per_rep.iter().map(|v| v[j].0).collect()));
                zmse_points.push(point(per_rep.iter().map(|v| v[j].1).collect()));
            }
        }
    }

    let through_origin = options.through_origin.unwrap_or(matches!(model, SyntheticModel::Nig));
    Ok(ScalingStudy {
        model,
        n_mc: options.n_mc,
        seed: options.seed,
        design: design.clone(),
        ence: fit_points("ENCE", model, ence_points, through_origin, options.level)?,
        zmse: fit_points("ZMSE", model, zmse_points, through_origin, options.level)?,
    })
}

/// Weighted straight-line fit of design points against (N/M)^{1/2} plus the
/// log-space estimate of the M exponent.
pub fn fit_points(
    statistic: &str,
    model: SyntheticModel,
    points: Vec<ScalingPoint>,
    through_origin: bool,
    level: f64,
) -> Result<ScalingFit> {
    let x: Vec<f64> = points.iter().map(|p| p.x).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let w: Vec<f64> = points
        .iter()
        .map(|p| 1.0 / p.standard_error.max(f64::MIN_POSITIVE).powi(2))
        .collect();
    let fit: LinearFit = weighted_fit(&x, &y, &w, through_origin)?;

    let intercept_interval = (!through_origin).then(|| {
        let half = t_quantile(fit.dof, 0.5 + level / 2.0) * fit.intercept_se;
        IntervalEstimate {
            point: fit.intercept,
            lower: fit.intercept - half,
            upper: fit.intercept + half,
            level,
            bias: 0.0,
            method: IntervalMethod::Regression,
            replicates: points.len(),
            degenerate: half == 0.0,
            warnings: Vec::new(),
        }
    });

    // ln(mean / sqrt(N)) = ln α + β ln M
    let (m_exponent, m_exponent_se) = {
        let lx: Vec<f64> = points.iter().map(|p| (p.m as f64).ln()).collect();
        let ly: Vec<f64> = points.iter().map(|p| (p.mean / (p.n as f64).sqrt()).ln()).collect();
        match ols(&lx, &ly) {
            Ok(f) => (Some(f.slope), Some(f.slope_se)),
            Err(_) => (None, None),
        }
    };

    let standardized_residuals = fit
        .residuals
        .iter()
        .zip(&points)
        .map(|(r, p)| r / p.standard_error)
        .collect();
    let mut rel: Vec<f64> = points.iter().map(|p| p.standard_error / p.mean).collect();
    rel.sort_by(f64::total_cmp);
    Ok(ScalingFit {
        statistic: statistic.to_string(),
        model,
        slope: fit.slope,
        slope_se: fit.slope_se,
        intercept: fit.intercept,
        intercept_interval,
        fit_through_origin: through_origin,
        m_exponent,
        m_exponent_se,
        standardized_residuals,
        reduced_chi2: fit.chi2 / fit.dof as f64,
        median_relative_se: crate::stats::quantile_sorted(&rel, 0.5),
        points,
    })
}
