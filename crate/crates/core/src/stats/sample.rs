use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Paired prediction errors and their (positive) uncertainties.
///
/// Optional feature columns travel with the pairs so that binning on an
/// input feature survives resampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    errors: Vec<f64>,
    uncertainties: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    features: Vec<Vec<f64>>,
}

impl PairedSample {
    pub fn new(errors: Vec<f64>, uncertainties: Vec<f64>) -> Result<Self> {
        Self::with_features(errors, uncertainties, Vec::new())
    }

    /// Builds a sample carrying extra feature columns (column-major, each of
    /// length M).
    pub fn with_features(errors: Vec<f64>, uncertainties: Vec<f64>, features: Vec<Vec<f64>>) -> Result<Self> {
        if errors.len() != uncertainties.len() {
            return Err(Error::LengthMismatch {
                errors: errors.len(),
                uncertainties: uncertainties.len(),
            });
        }
        if errors.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: errors.len(),
            });
        }
        for (index, (&e, &u)) in errors.iter().zip(&uncertainties).enumerate() {
            if !e.is_finite() {
                return Err(Error::NonFiniteValue {
                    index,
                    column: "E".into(),
                });
            }
            if !u.is_finite() {
                return Err(Error::NonFiniteValue {
                    index,
                    column: "uE".into(),
                });
            }
            if u <= 0.0 {
                return Err(Error::NonPositiveUncertainty { index, value: u });
            }
        }
        for (k, column) in features.iter().enumerate() {
            if column.len() != errors.len() {
                return Err(Error::LengthMismatch {
                    errors: errors.len(),
                    uncertainties: column.len(),
                });
            }
            if let Some(index) = column.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue {
                    index,
                    column: format!("feature {k}"),
                });
            }
        }
        Ok(Self {
            errors,
            uncertainties,
            features,
        })
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn uncertainties(&self) -> &[f64] {
        &self.uncertainties
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> Result<&[f64]> {
        self.features
            .get(index)
            .map(Vec::as_slice)
            .ok_or(Error::FeatureOutOfRange {
                index,
                available: self.features.len(),
            })
    }

    /// Number of pairs, M.
    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    /// Sub-sample made of the rows listed in `indices` (repetitions allowed).
    pub fn select(&self, indices: &[usize]) -> PairedSample {
        let pick = |v: &[f64]| indices.iter().map(|&i| v[i]).collect::<Vec<_>>();
        PairedSample {
            errors: pick(&self.errors),
            uncertainties: pick(&self.uncertainties),
            features: self.features.iter().map(|c| pick(c)).collect(),
        }
    }

    /// Same uncertainties and features, new errors. The caller guarantees
    /// finiteness and matching length.
    pub(crate) fn with_errors(&self, errors: Vec<f64>) -> PairedSample {
        debug_assert_eq!(errors.len(), self.len());
        PairedSample {
            errors,
            uncertainties: self.uncertainties.clone(),
            features: self.features.clone(),
        }
    }

    /// Builds a sample without validation. Used on hot Monte-Carlo paths where
    /// the inputs are valid by construction.
    pub(crate) fn from_parts_unchecked(
        errors: Vec<f64>,
        uncertainties: Vec<f64>,
        features: Vec<Vec<f64>>,
    ) -> PairedSample {
        PairedSample {
            errors,
            uncertainties,
            features,
        }
    }
}

/// Scaled errors Z_i = E_i / u_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScores(Vec<f64>);

impl ZScores {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn z_scores(sample: &PairedSample) -> ZScores {
    ZScores(
        sample
            .errors()
            .iter()
            .zip(sample.uncertainties())
            .map(|(e, u)| e / u)
            .collect(),
    )
}
