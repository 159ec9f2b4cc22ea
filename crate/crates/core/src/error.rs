use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by estimators, samplers, resampling and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("errors and uncertainties differ in length ({errors} vs {uncertainties})")]
    LengthMismatch { errors: usize, uncertainties: usize },

    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("uncertainty at row {index} is not strictly positive ({value})")]
    NonPositiveUncertainty { index: usize, value: f64 },

    #[error("non-finite value in column '{column}' at row {index}")]
    NonFiniteValue { index: usize, column: String },

    #[error("rank correlation is undefined: one variable is constant")]
    DegenerateRanks,

    #[error("cannot split {points} points into {bins} bins")]
    TooManyBins { bins: usize, points: usize },

    #[error("{bins} bins over {points} points leave fewer than {min_bin_size} points per bin")]
    BinTooSmall {
        bins: usize,
        points: usize,
        min_bin_size: usize,
    },

    #[error("bin {bin} has a zero ZMS (all errors are exactly zero)")]
    ZeroBinZms { bin: usize },

    #[error("mean absolute deviation about the median is zero")]
    DegenerateSpread,

    #[error("degrees of freedom must exceed 2 for a unit-variance Student-t, got {0}")]
    InvalidNu(f64),

    #[error(
        "Student-t fit did not converge after {iterations} iterations \
         (last iterate: mu={mu}, sigma={sigma}, nu={nu})"
    )]
    NonConvergence {
        iterations: usize,
        mu: f64,
        sigma: f64,
        nu: f64,
    },

    #[error("replicate {index} failed: {source}")]
    ReplicateFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("zeta-score is indeterminate (zero or negative interval half-width)")]
    IndeterminateZeta,

    #[error("{0} has no predefined reference value")]
    NoPredefinedReference(String),

    #[error("no bin count in the requested range satisfies the constraints")]
    InsufficientBins,

    #[error("feature column {index} requested but the sample has {available}")]
    FeatureOutOfRange { index: usize, available: usize },

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("file contains no data rows")]
    EmptyFile,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
