//! Paired samples, binning and point estimators of calibration statistics.

mod binning;
pub mod estimators;
mod kind;
mod quantile;
pub mod rank;
mod sample;
mod skewness;

pub use binning::{equal_count_bins, BinLayout, BinVariable, BinningConfig, DEFAULT_MIN_BIN_SIZE};
pub use estimators::{binned_rce, binned_zms, ence, ence_with_layout, nll, nll_ref, rce, zms, zmse, zmse_with_layout};
pub use kind::{PreparedStatistic, StatisticKind};
pub use quantile::{quantile, quantile_sorted};
pub use rank::{average_ranks, spearman, spearman_cc};
pub use sample::{z_scores, PairedSample, ZScores};
pub use skewness::{beta_gm, median};
