//! Validation of uncertainty-quantification calibration statistics.
//!
//! The crate estimates average and conditional calibration statistics (ZMS,
//! CC, RCE, ENCE, ZMSE, NLL) on paired errors and uncertainties, builds BCa
//! bootstrap intervals and Monte-Carlo reference values under configurable
//! generative distributions, and turns them into ζ-scores through a
//! sensitivity-gated validation workflow.

pub mod cli;
pub mod error;
pub mod generative;
pub mod io;
pub mod resampling;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
