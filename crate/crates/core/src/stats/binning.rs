use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::PairedSample;

/// Smallest bin size accepted by the bin-count scan of the extrapolation
/// test. Elsewhere bins are unconstrained unless a minimum is configured.
pub const DEFAULT_MIN_BIN_SIZE: usize = 20;

/// Variable used to order the data before splitting it into bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinVariable {
    /// Bin on u (tests consistency).
    #[default]
    Uncertainty,
    /// Bin on the feature column with this index (tests adaptivity).
    Feature(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningConfig {
    pub bins: usize,
    /// 1 (no constraint) unless set.
    #[serde(default = "default_min_bin_size")]
    pub min_bin_size: usize,
    #[serde(default)]
    pub variable: BinVariable,
}

fn default_min_bin_size() -> usize {
    1
}

impl BinningConfig {
    pub fn new(bins: usize) -> Self {
        Self {
            bins,
            min_bin_size: default_min_bin_size(),
            variable: BinVariable::Uncertainty,
        }
    }

    pub fn with_min_bin_size(mut self, min_bin_size: usize) -> Self {
        self.min_bin_size = min_bin_size;
        self
    }

    pub fn with_variable(mut self, variable: BinVariable) -> Self {
        self.variable = variable;
        self
    }

    /// Checks that `points` can be split into `bins` bins of at least
    /// `min_bin_size` points each.
    pub fn check(&self, points: usize) -> Result<()> {
        if self.bins == 0 || self.bins > points {
            return Err(Error::TooManyBins {
                bins: self.bins,
                points,
            });
        }
        if points / self.bins < self.min_bin_size {
            return Err(Error::BinTooSmall {
                bins: self.bins,
                points,
                min_bin_size: self.min_bin_size,
            });
        }
        Ok(())
    }

    /// Sort key for this config on `sample`.
    pub fn sort_key<'a>(&self, sample: &'a PairedSample) -> Result<&'a [f64]> {
        match self.variable {
            BinVariable::Uncertainty => Ok(sample.uncertainties()),
            BinVariable::Feature(k) => sample.feature(k),
        }
    }

    /// Validates the config against `sample` and returns its bin layout.
    pub fn layout(&self, sample: &PairedSample) -> Result<BinLayout> {
        self.check(sample.len())?;
        BinLayout::new(self.sort_key(sample)?, self.bins)
    }
}

/// Equal-count partition of a set of points, as a permutation plus the
/// position ranges of each bin inside that permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinLayout {
    order: Vec<usize>,
    ranges: Vec<Range<usize>>,
}

impl BinLayout {
    pub fn new(sort_key: &[f64], bins: usize) -> Result<Self> {
        let m = sort_key.len();
        if bins == 0 || bins > m {
            return Err(Error::TooManyBins { bins, points: m });
        }
        let mut order: Vec<usize> = (0..m).collect();
        // sort_by is stable: ties keep their original index order
        order.sort_by(|&a, &b| sort_key[a].total_cmp(&sort_key[b]));
        let ranges = (0..bins).map(|k| k * m / bins..(k + 1) * m / bins).collect();
        Ok(Self { order, ranges })
    }

    /// Layout over an order that is already sorted by the binning variable.
    pub fn from_sorted_order(order: Vec<usize>, bins: usize) -> Result<Self> {
        let m = order.len();
        if bins == 0 || bins > m {
            return Err(Error::TooManyBins { bins, points: m });
        }
        let ranges = (0..bins).map(|k| k * m / bins..(k + 1) * m / bins).collect();
        Ok(Self { order, ranges })
    }

    pub fn bin_count(&self) -> usize {
        self.ranges.len()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Original indices of the points in bin `k`.
    pub fn bin(&self, k: usize) -> &[usize] {
        &self.order[self.ranges[k].clone()]
    }

    pub fn bins(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.ranges.iter().map(move |r| &self.order[r.clone()])
    }

    pub fn sorted_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }
}

/// Sorts indices by `sort_key` and returns the N position ranges of the
/// equal-count bins, bin k covering `[k*M/N, (k+1)*M/N)`.
pub fn equal_count_bins(sort_key: &[f64], bins: usize) -> Result<(Vec<usize>, Vec<Range<usize>>)> {
    let layout = BinLayout::new(sort_key, bins)?;
    Ok((layout.order, layout.ranges))
}
