use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// Zero for fits through the origin.
    pub intercept_se: f64,
    pub through_origin: bool,
    /// Residual degrees of freedom.
    pub dof: usize,
    pub residuals: Vec<f64>,
    /// Weighted residual sum of squares.
    pub chi2: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Two-sided `level` interval on the intercept from the t distribution.
    pub fn intercept_interval(&self, level: f64) -> (f64, f64) {
        let half = t_quantile(self.dof, 0.5 + level / 2.0) * self.intercept_se;
        (self.intercept - half, self.intercept + half)
    }
}

pub fn t_quantile(dof: usize, p: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(p)
}

/// Weighted least squares; standard errors are scaled by the residual
/// variance, `chi2 / dof`.
pub fn weighted_fit(x: &[f64], y: &[f64], w: &[f64], through_origin: bool) -> Result<LinearFit> {
    let n = x.len();
    let params = if through_origin { 1 } else { 2 };
    if n != y.len() || n != w.len() {
        return Err(Error::InvalidConfig("regression inputs differ in length".into()));
    }
    if n <= params {
        return Err(Error::TooFewPoints {
            needed: params + 1,
            got: n,
        });
    }
    if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidConfig("regression weights must be positive".into()));
    }
    let dof = n - params;
    let sw: f64 = w.iter().sum();
    let swx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let swy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let swxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let swxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();

    let (slope, intercept, var_slope, var_intercept) = if through_origin {
        if swxx <= 0.0 {
            return Err(Error::InvalidConfig("regressor is identically zero".into()));
        }
        (swxy / swxx, 0.0, 1.0 / swxx, 0.0)
    } else {
        let det = sw * swxx - swx * swx;
        if det <= 0.0 {
            return Err(Error::InvalidConfig("regressor has no spread".into()));
        }
        let slope = (sw * swxy - swx * swy) / det;
        let intercept = (swxx * swy - swx * swxy) / det;
        (slope, intercept, sw / det, swxx / det)
    };
    let residuals: Vec<f64> = x.iter().zip(y).map(|(x, y)| y - intercept - slope * x).collect();
    let chi2: f64 = residuals.iter().zip(w).map(|(r, w)| w * r * r).sum();
    let scale = chi2 / dof as f64;
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: (var_slope * scale).sqrt(),
        intercept_se: (var_intercept * scale).sqrt(),
        through_origin,
        dof,
        residuals,
        chi2,
    })
}

/// Ordinary least squares with intercept.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    weighted_fit(x, y, &vec![1.0; x.len()], false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = ols(&x, &y).unwrap();
        assert_relative_eq!(f.slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 1.0, epsilon = 1e-12);
        assert!(f.intercept_se < 1e-12);
    }

    #[test]
    fn textbook_standard_errors() {
        // y = (1, 2, 2, 4) on x = (1, 2, 3, 4): slope 0.9, intercept 0,
        // RSS = 0.7, se(slope) = sqrt(0.35 / 5), se(intercept) = sqrt(0.35 * 1.5)
        let f = ols(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(f.slope, 0.9, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 0.0, epsilon = 1e-12);
        assert_relative_eq!(f.chi2, 0.7, epsilon = 1e-12);
        assert_relative_eq!(f.slope_se, (0.35f64 / 5.0).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(f.intercept_se, (0.35f64 * 1.5).sqrt(), epsilon = 1e-12);
        let (lo, hi) = f.intercept_interval(0.95);
        // t_{0.975, 2} = 4.302653
        assert_relative_eq!(hi, 4.302_652_729_911 * (0.525f64).sqrt(), epsilon = 1e-6);
        assert_relative_eq!(lo, -hi, epsilon = 1e-12);
    }

    #[test]
    fn through_origin_weighted() {
        let x = [1.0, 2.0, 3.0];
        let y = [2.0, 4.1, 5.9];
        let w = [1.0, 4.0, 1.0];
        let f = weighted_fit(&x, &y, &w, true).unwrap();
        // Σwxy / Σwx² = (2 + 32.8 + 17.7) / (1 + 16 + 9)
        assert_relative_eq!(f.slope, 52.5 / 26.0, epsilon = 1e-12);
        assert_eq!(f.intercept, 0.0);
        assert_eq!(f.dof, 2);
    }

    #[test]
    fn too_few_points() {
        assert!(ols(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(weighted_fit(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 1.0], true).is_ok());
    }
}
