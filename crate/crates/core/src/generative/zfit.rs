use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::simplex::{minimize, SimplexSettings};
use crate::error::{Error, Result};
use crate::stats::{median, quantile, z_scores, PairedSample};

const MIN_POINTS: usize = 50;
const MAX_RESTARTS: usize = 5;
// ν is confined to [e^-2.3, e^9.2] ≈ [0.1, 1e4]; the likelihood is flat past
// the upper end for near-normal data.
const LN_NU_RANGE: (f64, f64) = (-std::f64::consts::LN_10, 4.0 * std::f64::consts::LN_10);

/// Location-scale Student-t fit of z-scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZFit {
    pub mu_z: f64,
    pub sigma_z: f64,
    pub nu_z: f64,
    /// Relative bias in percent, `100 * mu_z / sigma_z`.
    pub b_z: f64,
    pub se_mu: f64,
    pub se_sigma: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Log-likelihood of `values` under a location-scale t(ν).
pub fn student_t_log_likelihood(values: &[f64], mu: f64, sigma: f64, nu: f64) -> f64 {
    let n = values.len() as f64;
    let norm = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln() - sigma.ln();
    let tail: f64 = values
        .iter()
        .map(|x| {
            let r = (x - mu) / sigma;
            (r * r / nu).ln_1p()
        })
        .sum();
    n * norm - 0.5 * (nu + 1.0) * tail
}

fn unpack(theta: &[f64]) -> (f64, f64, f64) {
    let ln_nu = theta[2].clamp(LN_NU_RANGE.0, LN_NU_RANGE.1);
    (theta[0], theta[1].exp(), ln_nu.exp())
}

pub fn fit_student_z(sample: &PairedSample) -> Result<ZFit> {
    fit_student_z_values(z_scores(sample).values())
}

/// Maximum-likelihood fit of (μ, σ, ν), optimized over (μ, ln σ, ln ν) by a
/// restarted simplex from a median/IQR start with ν = 6.
pub fn fit_student_z_values(z: &[f64]) -> Result<ZFit> {
    if z.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_POINTS,
            got: z.len(),
        });
    }
    let n = z.len() as f64;
    let objective = |theta: &[f64]| {
        let (mu, sigma, nu) = unpack(theta);
        -student_t_log_likelihood(z, mu, sigma, nu) / n
    };

    let iqr = quantile(z, 0.75) - quantile(z, 0.25);
    let sigma0 = if iqr > 0.0 { iqr / 1.35 } else { 1.0 };
    let mut x = vec![median(z), sigma0.ln(), 6f64.ln()];
    let mut best = objective(&x);
    let settings = SimplexSettings::default();
    let mut iterations = 0;

    for restart in 0..MAX_RESTARTS {
        let out = minimize(objective, &x, &settings);
        iterations += out.iterations;
        if !out.converged {
            let (mu, sigma, nu) = unpack(&out.x);
            return Err(Error::NonConvergence {
                iterations,
                mu,
                sigma,
                nu,
            });
        }
        let gain = best - out.value;
        x = out.x;
        best = out.value;
        if restart > 0 && gain.abs() <= settings.f_tolerance {
            break;
        }
    }

    let (mu, sigma, nu) = unpack(&x);
    let (se_mu, se_ln_sigma) = standard_errors(z, &x);
    Ok(ZFit {
        mu_z: mu,
        sigma_z: sigma,
        nu_z: nu,
        b_z: 100.0 * (mu - 0.0) / sigma,
        se_mu,
        se_sigma: sigma * se_ln_sigma,
        log_likelihood: -best * n,
        iterations,
        converged: true,
    })
}

/// Standard errors of μ and ln σ from the inverse observed information,
/// computed by central differences on the total negative log-likelihood.
fn standard_errors(z: &[f64], theta: &[f64]) -> (f64, f64) {
    let nll = |t: &[f64]| {
        let (mu, sigma, nu) = unpack(t);
        -student_t_log_likelihood(z, mu, sigma, nu)
    };
    let h = 1e-4;
    let dim = 3;
    let mut hess = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let shifted = |di: f64, dj: f64| {
                let mut t = theta.to_vec();
                t[i] += di;
                t[j] += dj;
                nll(&t)
            };
            let v = if i == j {
                (shifted(h, 0.0) - 2.0 * nll(theta) + shifted(-h, 0.0)) / (h * h)
            } else {
                (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h)
            };
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let full = invert(&hess).filter(|inv| inv[0][0] > 0.0 && inv[1][1] > 0.0);
    let inv = match full {
        Some(inv) => inv,
        // flat in ν (near-normal data): condition on ν
        None => {
            let sub = vec![hess[0][..2].to_vec(), hess[1][..2].to_vec()];
            match invert(&sub) {
                Some(inv) => inv,
                None => return (f64::NAN, f64::NAN),
            }
        }
    };
    (inv[0][0].max(0.0).sqrt(), inv[1][1].max(0.0).sqrt())
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let p = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= p);
        let pivot_row = a[col].clone();
        for (row, r) in a.iter_mut().enumerate() {
            if row != col {
                let factor = r[col];
                r.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= factor * p);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generative::{sample_unit, GenerativeSpec};

    #[test]
    fn log_likelihood_matches_closed_form() {
        // t(1) = Cauchy: ln f(0) = -ln π
        let ll = student_t_log_likelihood(&[0.0], 0.0, 1.0, 1.0);
        assert!((ll + std::f64::consts::PI.ln()).abs() < 1e-12);
        // location-scale: f(x) = f0((x-μ)/σ)/σ
        let a = student_t_log_likelihood(&[2.5], 0.5, 2.0, 4.0);
        let b = student_t_log_likelihood(&[1.0], 0.0, 1.0, 4.0) - 2f64.ln();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn recovers_t6() {
        let z = sample_unit(GenerativeSpec::t6(), 5000, 77);
        let fit = fit_student_z_values(&z).unwrap();
        assert!(fit.converged);
        assert!((4.5..=8.0).contains(&fit.nu_z), "nu {}", fit.nu_z);
        // scale of a unit-variance t(6) is sqrt(4/6)
        assert!((fit.sigma_z - (4.0f64 / 6.0).sqrt()).abs() < 0.05);
        assert!(fit.se_mu > 0.0 && fit.se_sigma > 0.0);
    }

    #[test]
    fn normal_data_gives_large_nu() {
        let z = sample_unit(GenerativeSpec::Normal, 5000, 78);
        let fit = fit_student_z_values(&z).unwrap();
        assert!(fit.nu_z > 20.0, "nu {}", fit.nu_z);
        assert!((fit.sigma_z - 1.0).abs() < 0.05);
    }

    #[test]
    fn shifted_normal_bias() {
        let z: Vec<f64> = sample_unit(GenerativeSpec::Normal, 5000, 79)
            .into_iter()
            .map(|v| v + 0.5)
            .collect();
        let fit = fit_student_z_values(&z).unwrap();
        assert_eq!(fit.b_z, 100.0 * fit.mu_z / fit.sigma_z);
        assert!((fit.b_z - 50.0).abs() < 5.0, "b_Z {}", fit.b_z);
    }

    #[test]
    fn optimum_beats_true_parameters() {
        for seed in 0..5 {
            let z = sample_unit(GenerativeSpec::t6(), 2000, seed);
            let fit = fit_student_z_values(&z).unwrap();
            let truth = student_t_log_likelihood(&z, 0.0, (4.0f64 / 6.0).sqrt(), 6.0);
            assert!(fit.log_likelihood >= truth - 1e-6, "{} < {}", fit.log_likelihood, truth);
        }
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_student_z_values(&[0.1; 10]),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn inverse_of_known_matrix() {
        let m = vec![vec![4.0, 7.0], vec![2.0, 6.0]];
        let inv = invert(&m).unwrap();
        assert!((inv[0][0] - 0.6).abs() < 1e-12 && (inv[0][1] + 0.7).abs() < 1e-12);
        assert!(invert(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }
}
