use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{rng_from_seed, GenerativeSpec};
use crate::error::{Error, Result};
use crate::stats::PairedSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticModel {
    /// Normal errors on inverse-gamma variances.
    Nig,
    /// t_s(6) errors on inverse-gamma variances.
    T6ig,
}

impl SyntheticModel {
    pub fn error_distribution(&self) -> GenerativeSpec {
        match self {
            Self::Nig => GenerativeSpec::Normal,
            Self::T6ig => GenerativeSpec::t6(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_lowercase().as_str() {
            "nig" => Ok(Self::Nig),
            "t6ig" => Ok(Self::T6ig),
            other => Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Nig => "NIG",
            Self::T6ig => "T6IG",
        }
    }
}

/// Fully synthetic calibrated dataset: `u² ~ InvGamma(ν/2, ν/2)`,
/// `E = u * eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticModelSpec {
    pub kind: SyntheticModel,
    pub nu_uncertainty: f64,
    pub size: usize,
}

impl SyntheticModelSpec {
    pub fn new(kind: SyntheticModel, nu_uncertainty: f64, size: usize) -> Result<Self> {
        if nu_uncertainty.is_nan() || nu_uncertainty <= 2.0 {
            return Err(Error::InvalidNu(nu_uncertainty));
        }
        if size < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: size });
        }
        Ok(Self {
            kind,
            nu_uncertainty,
            size,
        })
    }
}

pub fn gen_synthetic(model: &SyntheticModelSpec, seed: u64) -> PairedSample {
    gen_synthetic_with_rng(model, &mut rng_from_seed(seed))
}

pub fn gen_synthetic_with_rng<R: Rng + ?Sized>(model: &SyntheticModelSpec, rng: &mut R) -> PairedSample {
    let half = model.nu_uncertainty / 2.0;
    // rate ν/2 -> scale 2/ν
    let gamma = Gamma::new(half, 1.0 / half).expect("valid gamma parameters");
    let uncertainties: Vec<f64> = (0..model.size)
        .map(|_| {
            let precision: f64 = gamma.sample(rng);
            (1.0 / precision).sqrt()
        })
        .collect();
    let errors = super::synth_errors_with(&uncertainties, model.kind.error_distribution(), rng);
    PairedSample::from_parts_unchecked(errors, uncertainties, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_se(x: impl Iterator<Item = f64>) -> (f64, f64) {
        let v: Vec<f64> = x.collect();
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }

    #[test]
    fn nig_moments() {
        let spec = SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 100_000).unwrap();
        let s = gen_synthetic(&spec, 2024);
        let (mu2, se_u) = mean_se(s.uncertainties().iter().map(|u| u * u));
        let (me2, se_e) = mean_se(s.errors().iter().map(|e| e * e));
        assert!((mu2 - 1.5).abs() < 3.0 * se_u, "<u²>={mu2} se={se_u}");
        assert!((me2 - 1.5).abs() < 3.0 * se_e, "<E²>={me2} se={se_e}");
    }

    #[test]
    fn law_of_total_variance() {
        for kind in [SyntheticModel::Nig, SyntheticModel::T6ig] {
            let spec = SyntheticModelSpec::new(kind, 12.0, 100_000).unwrap();
            let s = gen_synthetic(&spec, 5);
            let (_, se) = mean_se(s.errors().iter().map(|e| e * e));
            let n = s.len() as f64;
            let mean_e = s.errors().iter().sum::<f64>() / n;
            let var_e = s.errors().iter().map(|e| (e - mean_e).powi(2)).sum::<f64>() / (n - 1.0);
            let mean_u2 = s.uncertainties().iter().map(|u| u * u).sum::<f64>() / n;
            assert!((var_e - mean_u2).abs() < 3.0 * se, "{kind:?}: {var_e} vs {mean_u2}");
        }
    }

    #[test]
    fn deterministic_and_valid() {
        let spec = SyntheticModelSpec::new(SyntheticModel::T6ig, 4.0, 1000).unwrap();
        let a = gen_synthetic(&spec, 1);
        assert_eq!(a, gen_synthetic(&spec, 1));
        assert!(a.uncertainties().iter().all(|u| u.is_finite() && *u > 0.0));
        assert!(SyntheticModelSpec::new(SyntheticModel::Nig, 2.0, 10).is_err());
    }
}
