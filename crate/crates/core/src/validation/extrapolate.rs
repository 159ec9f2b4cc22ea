//! Generative-model-free check of conditional calibration: a binned
//! statistic is computed for a range of bin counts, regressed on
//! (N/M)^{1/2}, and the intercept is compared to zero.
//!
//! The values at neighbouring bin counts are computed from the same data
//! and are strongly correlated, so the textbook least-squares interval on
//! the intercept is far too narrow. By default the interval is instead
//! `intercept ± z * sd`, with `sd` the spread of the intercept over paired
//! bootstrap resamples of the whole dataset; the least-squares interval is
//! still reported alongside.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::regression::ols;
use crate::error::{Error, Result};
use crate::generative::{rng_from_seed, SyntheticModel};
use crate::resampling::{
    derive_replicate_seed, mean_sd, paired_resample_indices, Execution, IntervalEstimate, IntervalMethod,
};
use crate::stats::{
    ence_with_layout, zmse_with_layout, BinLayout, BinVariable, BinningConfig, PairedSample, DEFAULT_MIN_BIN_SIZE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BinnedStatistic {
    Ence,
    Zmse,
}

impl BinnedStatistic {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ence => "ENCE",
            Self::Zmse => "ZMSE",
        }
    }

    pub fn evaluate(&self, sample: &PairedSample, binning: &BinningConfig) -> Result<f64> {
        self.evaluate_with_layout(sample, &binning.layout(sample)?)
    }

    pub fn evaluate_with_layout(&self, sample: &PairedSample, layout: &BinLayout) -> Result<f64> {
        match self {
            Self::Ence => Ok(ence_with_layout(sample, layout)),
            Self::Zmse => zmse_with_layout(sample, layout),
        }
    }

    /// Published reference line `intercept + slope * (N/M)^{1/2}` for
    /// calibrated data from a synthetic model.
    pub fn reference_line(&self, model: SyntheticModel) -> ReferenceLine {
        let (intercept, slope) = match (self, model) {
            (Self::Ence, SyntheticModel::Nig) => (0.0, 0.56),
            (Self::Zmse, SyntheticModel::Nig) => (0.0, 1.14),
            (Self::Ence, SyntheticModel::T6ig) => (0.004, 0.779),
            (Self::Zmse, SyntheticModel::T6ig) => (0.006, 1.577),
        };
        ReferenceLine {
            model,
            intercept,
            slope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub model: SyntheticModel,
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationSettings {
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    pub min_bin_size: usize,
    /// Only bin counts strictly above this enter the fit.
    pub fit_above: usize,
    pub level: f64,
    pub variable: BinVariable,
    /// Bootstrap resamples for the intercept interval; 0 uses the
    /// least-squares interval.
    #[serde(default = "default_replicates")]
    pub bootstrap_replicates: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_replicates() -> usize {
    200
}

impl Default for ExtrapolationSettings {
    fn default() -> Self {
        Self {
            n_min: 10,
            n_max: 150,
            n_step: 10,
            min_bin_size: DEFAULT_MIN_BIN_SIZE,
            fit_above: 20,
            level: 0.95,
            variable: BinVariable::Uncertainty,
            bootstrap_replicates: default_replicates(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationPoint {
    pub n: usize,
    pub x: f64,
    pub value: f64,
    pub used_in_fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub statistic: BinnedStatistic,
    pub m: usize,
    pub settings: ExtrapolationSettings,
    pub points: Vec<ExtrapolationPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub intercept_interval: IntervalEstimate,
    /// Textbook interval from the least-squares standard error, which
    /// ignores the correlation between points.
    pub ols_intercept_interval: IntervalEstimate,
    /// The intercept interval contains zero.
    pub consistent: bool,
    pub reference_lines: Vec<ReferenceLine>,
}

/// Largest usable bin count: `min(n_max, floor(M / min_bin_size))`.
pub fn max_bins(m: usize, settings: &ExtrapolationSettings) -> usize {
    settings.n_max.min(m / settings.min_bin_size.max(1))
}

pub fn extrapolate_to_zero_bins(
    sample: &PairedSample,
    stat: BinnedStatistic,
    settings: &ExtrapolationSettings,
) -> Result<Extrapolation> {
    extrapolate_to_zero_bins_with(sample, stat, settings, Execution::Parallel)
}

pub fn extrapolate_to_zero_bins_with(
    sample: &PairedSample,
    stat: BinnedStatistic,
    settings: &ExtrapolationSettings,
    execution: Execution,
) -> Result<Extrapolation> {
    if settings.n_step == 0 || settings.n_min == 0 {
        return Err(Error::InvalidConfig(
            "bin range must start above 0 with a positive step".into(),
        ));
    }
    if !(settings.level > 0.0 && settings.level < 1.0) {
        return Err(Error::InvalidConfig(format!("level {} outside (0, 1)", settings.level)));
    }
    let m = sample.len();
    let bins: Vec<usize> = (settings.n_min..=max_bins(m, settings))
        .step_by(settings.n_step)
        .collect();
    let values = curve(sample, stat, settings, &bins)?;
    let points: Vec<ExtrapolationPoint> = bins
        .iter()
        .zip(&values)
        .map(|(&n, &value)| ExtrapolationPoint {
            n,
            x: (n as f64 / m as f64).sqrt(),
            value,
            used_in_fit: n > settings.fit_above,
        })
        .collect();
    if points.iter().filter(|p| p.used_in_fit).count() < 3 {
        return Err(Error::InsufficientBins);
    }
    let fit_line = |values: &[f64]| {
        let (x, y): (Vec<f64>, Vec<f64>) = points
            .iter()
            .zip(values)
            .filter(|(p, _)| p.used_in_fit)
            .map(|(p, v)| (p.x, *v))
            .unzip();
        ols(&x, &y)
    };
    let fit = fit_line(&values)?;
    let fitted = points.iter().filter(|p| p.used_in_fit).count();

    let (lower, upper) = fit.intercept_interval(settings.level);
    let ols_intercept_interval = IntervalEstimate {
        point: fit.intercept,
        lower,
        upper,
        level: settings.level,
        bias: 0.0,
        method: IntervalMethod::Regression,
        replicates: fitted,
        degenerate: lower == upper,
        warnings: Vec::new(),
    };

    let intercept_interval = if settings.bootstrap_replicates == 0 {
        ols_intercept_interval.clone()
    } else {
        let b = settings.bootstrap_replicates;
        let intercepts = execution.try_map(b, |i| {
            let mut rng = rng_from_seed(derive_replicate_seed(settings.seed, i as u64));
            let resample = sample.select(&paired_resample_indices(m, &mut rng));
            Ok(fit_line(&curve(&resample, stat, settings, &bins)?)?.intercept)
        })?;
        let (mean, sd) = mean_sd(&intercepts);
        let half = Normal::standard().inverse_cdf(0.5 + settings.level / 2.0) * sd;
        IntervalEstimate {
            point: fit.intercept,
            lower: fit.intercept - half,
            upper: fit.intercept + half,
            level: settings.level,
            bias: mean - fit.intercept,
            method: IntervalMethod::BootstrapSe,
            replicates: b,
            degenerate: half == 0.0,
            warnings: Vec::new(),
        }
    };

    Ok(Extrapolation {
        statistic: stat,
        m,
        settings: *settings,
        points,
        slope: fit.slope,
        intercept: fit.intercept,
        consistent: intercept_interval.contains(0.0),
        intercept_interval,
        ols_intercept_interval,
        reference_lines: vec![
            stat.reference_line(SyntheticModel::Nig),
            stat.reference_line(SyntheticModel::T6ig),
        ],
    })
}

/// Statistic values for each bin count, sorting the data once.
fn curve(
    sample: &PairedSample,
    stat: BinnedStatistic,
    settings: &ExtrapolationSettings,
    bins: &[usize],
) -> Result<Vec<f64>> {
    let key = BinningConfig::new(1)
        .with_variable(settings.variable)
        .sort_key(sample)?;
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| key[a].total_cmp(&key[b]));
    bins.iter()
        .map(|&n| stat.evaluate_with_layout(sample, &BinLayout::from_sorted_order(order.clone(), n)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::zmse;

    #[test]
    fn bin_cap() {
        let s = ExtrapolationSettings::default();
        assert_eq!(max_bins(2040, &s), 102);
        assert_eq!(max_bins(5000, &s), 150);
    }

    #[test]
    fn layout_reuse_matches_direct_evaluation() {
        use crate::generative::{gen_synthetic, SyntheticModelSpec};
        let s = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 2040).unwrap(), 4);
        let settings = ExtrapolationSettings {
            bootstrap_replicates: 0,
            ..Default::default()
        };
        let r = extrapolate_to_zero_bins(&s, BinnedStatistic::Zmse, &settings).unwrap();
        assert_eq!(r.points.last().unwrap().n, 100);
        for p in &r.points {
            let direct = zmse(&s, &BinningConfig::new(p.n)).unwrap();
            assert_eq!(p.value, direct);
        }
        assert_eq!(r.intercept_interval, r.ols_intercept_interval);
    }

    #[test]
    fn bootstrap_interval_is_wider_and_deterministic() {
        use crate::generative::{gen_synthetic, SyntheticModelSpec};
        let s = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 3000).unwrap(), 5);
        let settings = ExtrapolationSettings {
            bootstrap_replicates: 100,
            ..Default::default()
        };
        let a = extrapolate_to_zero_bins(&s, BinnedStatistic::Zmse, &settings).unwrap();
        let b = extrapolate_to_zero_bins_with(&s, BinnedStatistic::Zmse, &settings, Execution::Serial).unwrap();
        assert_eq!(a, b);
        assert!(a.intercept_interval.half_width() > a.ols_intercept_interval.half_width());
        assert_eq!(a.intercept_interval.point, a.ols_intercept_interval.point);
    }

    #[test]
    fn too_small_sample() {
        let u: Vec<f64> = (1..=300).map(f64::from).collect();
        let s = PairedSample::new(u.clone(), u).unwrap();
        assert!(matches!(
            extrapolate_to_zero_bins(&s, BinnedStatistic::Zmse, &ExtrapolationSettings::default()),
            Err(Error::InsufficientBins)
        ));
    }
}
