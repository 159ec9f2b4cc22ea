//! ζ-scores, the sensitivity-gated validation workflow, and the studies
//! that characterise binned statistics (ν scans, size scaling,
//! extrapolation to zero bin width).

mod extrapolate;
mod regression;
mod scaling;
mod scans;
mod workflow;
mod zeta;

pub use extrapolate::{
    extrapolate_to_zero_bins, extrapolate_to_zero_bins_with, max_bins, BinnedStatistic, Extrapolation,
    ExtrapolationPoint, ExtrapolationSettings, ReferenceLine,
};
pub use regression::{ols, t_quantile, weighted_fit, LinearFit};
pub use scaling::{fit_points, scaling_study, ScalingDesign, ScalingFit, ScalingOptions, ScalingPoint, ScalingStudy};
pub use scans::{default_nu_grid, scan_datasets, scan_nu, DatasetScanPoint, NuScanPoint};
pub use workflow::{
    fitness_screening, is_over_sensitive, sensitivity_gate, sensitivity_gate_for, sim2_score, sim_score, validate,
    zeta_bs, zeta_sim, zeta_sim2, Route, Screening, SensitivityGate, ValidationConfig, ValidationReport, Verdict,
    BETA_GM_LIMIT_E2, BETA_GM_LIMIT_U2, BETA_GM_LIMIT_Z2,
};
pub use zeta::{zeta, Centering, Scheme, ZetaScore};
