use crate::error::{Error, Result};

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Groeneveld–Meeden robust skewness, `(mean - median) / E|X - median|`.
///
/// Lies in [-1, 1] and vanishes for symmetric data.
pub fn beta_gm(values: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let med = median(values);
    let mean = values.iter().sum::<f64>() / n;
    let mad = values.iter().map(|x| (x - med).abs()).sum::<f64>() / n;
    if mad == 0.0 {
        return Err(Error::DegenerateSpread);
    }
    Ok(((mean - med) / mad).clamp(-1.0, 1.0))
}
