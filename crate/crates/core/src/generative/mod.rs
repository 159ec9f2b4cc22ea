//! Unit-variance generative distributions linking errors to uncertainties,
//! synthetic calibrated datasets and Student-t fits of z-scores.

mod simplex;
mod synthetic;
mod zfit;

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use simplex::{minimize, SimplexOutcome, SimplexSettings};
pub use synthetic::{gen_synthetic, gen_synthetic_with_rng, SyntheticModel, SyntheticModelSpec};
pub use zfit::{fit_student_z, fit_student_z_values, student_t_log_likelihood, ZFit};

/// Smallest degrees of freedom used when re-simulating from a fitted ν ≤ 2.
pub const FITTED_NU_FLOOR: f64 = 2.1;

/// Deterministic RNG for a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Zero-mean, unit-variance distribution D(0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSpec")]
pub enum GenerativeSpec {
    Normal,
    /// Student's t with ν degrees of freedom divided by √(ν/(ν−2)).
    ScaledStudentT {
        nu: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSpec {
    Normal,
    ScaledStudentT { nu: f64 },
}

impl TryFrom<RawSpec> for GenerativeSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::Normal => Ok(Self::Normal),
            RawSpec::ScaledStudentT { nu } => Self::student_t(nu),
        }
    }
}

impl GenerativeSpec {
    pub fn normal() -> Self {
        Self::Normal
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        if nu.is_nan() || nu <= 2.0 {
            return Err(Error::InvalidNu(nu));
        }
        Ok(Self::ScaledStudentT { nu })
    }

    /// t_s(6), the default heavy-tailed alternative to the normal.
    pub fn t6() -> Self {
        Self::ScaledStudentT { nu: 6.0 }
    }

    /// Builds t_s(ν) from a fitted ν, raising ν ≤ 2 to [`FITTED_NU_FLOOR`].
    /// The second element carries a warning when the value was changed.
    pub fn from_fitted_nu(nu: f64) -> (Self, Option<String>) {
        if nu > 2.0 {
            (Self::ScaledStudentT { nu }, None)
        } else {
            let msg = format!("fitted nu={nu:.3} gives infinite variance; using nu={FITTED_NU_FLOOR} instead");
            log::warn!("{msg}");
            (Self::ScaledStudentT { nu: FITTED_NU_FLOOR }, Some(msg))
        }
    }

    /// Parses `normal`, `t6`, `t:<nu>` (also `t<nu>`).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        if t == "normal" || t == "n" {
            return Ok(Self::Normal);
        }
        let nu = t
            .strip_prefix("t:")
            .or_else(|| t.strip_prefix('t'))
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| {
                Error::InvalidConfig(format!("unknown distribution '{text}' (expected normal, t6 or t:<nu>)"))
            })?;
        Self::student_t(nu)
    }

    pub fn label(&self) -> String {
        match self {
            Self::Normal => "N".to_string(),
            Self::ScaledStudentT { nu } => format!("T{nu}"),
        }
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Normal => StandardNormal.sample(rng),
            Self::ScaledStudentT { nu } => {
                // nu > 2 is enforced at construction
                let t = StudentT::new(nu).expect("valid degrees of freedom");
                t.sample(rng) / (nu / (nu - 2.0)).sqrt()
            }
        }
    }

    pub fn fill_with<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            Self::Normal => out.iter_mut().for_each(|x| *x = StandardNormal.sample(rng)),
            Self::ScaledStudentT { nu } => {
                let t = StudentT::new(nu).expect("valid degrees of freedom");
                let scale = (nu / (nu - 2.0)).sqrt();
                out.iter_mut().for_each(|x| *x = t.sample(rng) / scale);
            }
        }
    }
}

impl fmt::Display for GenerativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Normal => f.write_str("N(0,1)"),
            Self::ScaledStudentT { nu } => write!(f, "t_s({nu})"),
        }
    }
}

/// `n` i.i.d. draws from `d`, a pure function of `(d, n, seed)`.
pub fn sample_unit(d: GenerativeSpec, n: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    d.fill_with(&mut rng_from_seed(seed), &mut out);
    out
}

/// Pseudo-errors `E_i = u_i * eps_i` with `eps ~ d`.
pub fn synth_errors(uncertainties: &[f64], d: GenerativeSpec, seed: u64) -> Vec<f64> {
    let mut out = sample_unit(d, uncertainties.len(), seed);
    out.iter_mut().zip(uncertainties).for_each(|(e, u)| *e *= u);
    out
}

pub(crate) fn synth_errors_with<R: Rng + ?Sized>(uncertainties: &[f64], d: GenerativeSpec, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; uncertainties.len()];
    d.fill_with(rng, &mut out);
    out.iter_mut().zip(uncertainties).for_each(|(e, u)| *e *= u);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn normal_has_unit_variance() {
        let n = 1_000_000;
        let (m, v) = mean_var(&sample_unit(GenerativeSpec::Normal, n, 11));
        assert!(m.abs() < 3.0 / (n as f64).sqrt());
        assert!((v - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "var {v}");
    }

    #[test]
    fn scaled_t6_has_unit_variance() {
        let n = 1_000_000;
        let (_, v) = mean_var(&sample_unit(GenerativeSpec::t6(), n, 12));
        // Var(eps²) = kurtosis - 1 = 5 for t(6)
        assert!((v - 1.0).abs() < 3.0 * (5.0 / n as f64).sqrt(), "var {v}");
    }

    #[test]
    fn determinism() {
        for d in [GenerativeSpec::Normal, GenerativeSpec::t6()] {
            let a = sample_unit(d, 1000, 99);
            let b = sample_unit(d, 1000, 99);
            assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
            assert_ne!(a, sample_unit(d, 1000, 100));
        }
    }

    #[test]
    fn synth_errors_scaling() {
        let d = GenerativeSpec::t6();
        assert_eq!(synth_errors(&[1.0; 500], d, 3), sample_unit(d, 500, 3));

        let e = synth_errors(&vec![2.0; 200_000], GenerativeSpec::Normal, 4);
        let (_, v) = mean_var(&e);
        assert!((v - 4.0).abs() < 0.05, "var {v}");
    }

    #[test]
    fn nu_validation() {
        assert!(matches!(GenerativeSpec::student_t(2.0), Err(Error::InvalidNu(_))));
        assert!(GenerativeSpec::student_t(2.0001).is_ok());
        let (d, warn) = GenerativeSpec::from_fitted_nu(1.4);
        assert_eq!(d, GenerativeSpec::ScaledStudentT { nu: 2.1 });
        assert!(warn.is_some());
        assert!(GenerativeSpec::from_fitted_nu(6.0).1.is_none());
    }

    #[test]
    fn parse_and_serde() {
        assert_eq!(GenerativeSpec::parse("normal").unwrap(), GenerativeSpec::Normal);
        assert_eq!(GenerativeSpec::parse("t6").unwrap(), GenerativeSpec::t6());
        assert_eq!(
            GenerativeSpec::parse("t:3.5").unwrap(),
            GenerativeSpec::ScaledStudentT { nu: 3.5 }
        );
        assert!(GenerativeSpec::parse("t:2").is_err());
        assert!(GenerativeSpec::parse("cauchy").is_err());

        let json = serde_json::to_string(&GenerativeSpec::t6()).unwrap();
        assert_eq!(json, r#"{"kind":"scaled_student_t","nu":6.0}"#);
        assert_eq!(
            serde_json::from_str::<GenerativeSpec>(&json).unwrap(),
            GenerativeSpec::t6()
        );
        assert!(serde_json::from_str::<GenerativeSpec>(r#"{"kind":"scaled_student_t","nu":1.5}"#).is_err());
    }
}
