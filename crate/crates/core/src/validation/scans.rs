//! Sensitivity of simulated references to the generative shape and to the
//! dataset.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::generative::GenerativeSpec;
use crate::resampling::{derive_stream_seed, simulate_reference_for, McOptions};
use crate::stats::{PairedSample, StatisticKind};

/// ν values 3, 4, ..., 20.
pub fn default_nu_grid() -> Vec<f64> {
    (3..=20).map(f64::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuScanPoint {
    pub nu: f64,
    pub mean: f64,
    pub standard_error: f64,
}

/// Simulated reference under t_s(ν) for each ν of `nu_grid`. Grid point k
/// uses the stream `derive_stream_seed(options.seed, k)`.
pub fn scan_nu(
    sample: &PairedSample,
    stat: &StatisticKind,
    nu_grid: &[f64],
    options: &McOptions,
) -> Result<Vec<NuScanPoint>> {
    nu_grid
        .iter()
        .enumerate()
        .map(|(k, &nu)| {
            let d = GenerativeSpec::student_t(nu)?;
            let opts = McOptions {
                seed: derive_stream_seed(options.seed, k as u64),
                ..*options
            };
            let r = simulate_reference_for(sample, stat, d, &opts)?;
            Ok(NuScanPoint {
                nu,
                mean: r.mean,
                standard_error: r.standard_error,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetScanPoint {
    pub m: usize,
    pub mean: f64,
    pub standard_error: f64,
    /// `mean * sqrt(M)`, removing the dataset-size trend of binned statistics.
    pub corrected: f64,
    pub corrected_standard_error: f64,
}

/// Simulated reference for each dataset, all with the same seed so that
/// identical uncertainty sets give identical references.
pub fn scan_datasets(
    samples: &[PairedSample],
    stat: &StatisticKind,
    d: GenerativeSpec,
    options: &McOptions,
) -> Result<Vec<DatasetScanPoint>> {
    samples
        .iter()
        .map(|s| {
            let r = simulate_reference_for(s, stat, d, options)?;
            let root_m = (s.len() as f64).sqrt();
            Ok(DatasetScanPoint {
                m: s.len(),
                mean: r.mean,
                standard_error: r.standard_error,
                corrected: r.mean * root_m,
                corrected_standard_error: r.standard_error * root_m,
            })
        })
        .collect()
}
