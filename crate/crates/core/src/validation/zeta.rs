use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resampling::IntervalEstimate;

/// Which value the interval is centered on when measuring ζ denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Interval built around the estimate (bootstrap CI): BS and Sim schemes.
    OnEstimate,
    /// Interval built around the reference (Monte-Carlo quantiles): Sim2.
    OnReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Predefined reference, bootstrap interval.
    #[serde(rename = "BS")]
    Bs,
    #[serde(rename = "SimN")]
    SimN,
    #[serde(rename = "SimT")]
    SimT,
    #[serde(rename = "Sim2N")]
    Sim2N,
    #[serde(rename = "Sim2T")]
    Sim2T,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bs => "BS",
            Self::SimN => "SimN",
            Self::SimT => "SimT",
            Self::Sim2N => "Sim2N",
            Self::Sim2T => "Sim2T",
        }
    }

    pub fn centering(&self) -> Centering {
        match self {
            Self::Bs | Self::SimN | Self::SimT => Centering::OnEstimate,
            Self::Sim2N | Self::Sim2T => Centering::OnReference,
        }
    }
}

/// Standardized deviation of `theta_est` from `theta_ref` in units of the
/// interval half-width on the side facing the reference.
///
/// Returns 0 whenever the two values coincide, whatever the interval.
pub fn zeta(theta_est: f64, theta_ref: f64, bounds: (f64, f64), centering: Centering) -> Result<f64> {
    let (lower, upper) = bounds;
    let diff = theta_est - theta_ref;
    if diff == 0.0 {
        return Ok(0.0);
    }
    let denom = match (centering, diff <= 0.0) {
        (Centering::OnEstimate, true) => upper - theta_est,
        (Centering::OnEstimate, false) => theta_est - lower,
        (Centering::OnReference, true) => theta_ref - lower,
        (Centering::OnReference, false) => upper - theta_ref,
    };
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::IndeterminateZeta);
    }
    Ok(diff / denom)
}

/// One ζ-score with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaScore {
    pub scheme: Scheme,
    pub theta_est: f64,
    pub theta_ref: f64,
    pub interval: IntervalEstimate,
    /// `None` when the interval gives no usable half-width.
    pub zeta: Option<f64>,
    /// |ζ| ≤ 1; `None` when ζ is indeterminate.
    pub valid: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ZetaScore {
    pub fn new(scheme: Scheme, theta_est: f64, theta_ref: f64, interval: IntervalEstimate) -> Self {
        let z = zeta(theta_est, theta_ref, interval.bounds(), scheme.centering()).ok();
        Self {
            scheme,
            theta_est,
            theta_ref,
            interval,
            zeta: z,
            valid: z.map(|v| v.abs() <= 1.0),
            warnings: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_values() {
        let z = zeta(0.96, 1.0, (0.87, 1.12), Centering::OnEstimate).unwrap();
        assert_relative_eq!(z, -0.25, epsilon = 1e-12);
        let z = zeta(0.244, 0.045, (0.030, 0.062), Centering::OnReference).unwrap();
        assert_relative_eq!(z, 0.199 / 0.017, epsilon = 1e-12);
        let z = zeta(0.96, 1.0, (0.94, 1.06), Centering::OnReference).unwrap();
        assert_relative_eq!(z, -2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_values_give_zero() {
        assert_eq!(zeta(1.0, 1.0, (1.0, 1.0), Centering::OnEstimate).unwrap(), 0.0);
        assert_eq!(zeta(0.3, 0.3, (5.0, -5.0), Centering::OnReference).unwrap(), 0.0);
    }

    #[test]
    fn indeterminate() {
        assert!(matches!(
            zeta(1.1, 1.0, (1.1, 1.1), Centering::OnEstimate),
            Err(Error::IndeterminateZeta)
        ));
        assert!(matches!(
            zeta(0.9, 1.0, (1.0, 1.2), Centering::OnReference),
            Err(Error::IndeterminateZeta)
        ));
    }

    #[test]
    fn score_flags() {
        let iv = IntervalEstimate::from_bounds(1.2, 1.2, 1.2, crate::resampling::IntervalMethod::Bca);
        let s = ZetaScore::new(Scheme::Bs, 1.2, 1.0, iv);
        assert_eq!(s.zeta, None);
        assert_eq!(s.valid, None);
    }
}
