//! Point estimators for average and conditional calibration.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::stats::{BinLayout, BinningConfig, PairedSample};

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Mean of squared z-scores, `<Z²>`. Equals 1 for calibrated data.
pub fn zms(sample: &PairedSample) -> f64 {
    mean(
        sample
            .errors()
            .iter()
            .zip(sample.uncertainties())
            .map(|(e, u)| (e / u).powi(2)),
    )
}

/// Relative calibration error `(RMV - RMSE) / RMV`.
pub fn rce(sample: &PairedSample) -> f64 {
    rce_of(sample, 0..sample.len())
}

fn rce_of(sample: &PairedSample, idx: impl ExactSizeIterator<Item = usize> + Clone) -> f64 {
    let e = sample.errors();
    let u = sample.uncertainties();
    let rmse = mean(idx.clone().map(|i| e[i] * e[i])).sqrt();
    let rmv = mean(idx.map(|i| u[i] * u[i])).sqrt();
    (rmv - rmse) / rmv
}

fn zms_of(sample: &PairedSample, idx: &[usize]) -> f64 {
    let e = sample.errors();
    let u = sample.uncertainties();
    mean(idx.iter().map(|&i| (e[i] / u[i]).powi(2)))
}

fn mean_log_u2(sample: &PairedSample) -> f64 {
    mean(sample.uncertainties().iter().map(|u| (u * u).ln()))
}

/// Gaussian negative log-likelihood score `½(<Z²> + <ln u²> + ln 2π)`.
pub fn nll(sample: &PairedSample) -> f64 {
    0.5 * (zms(sample) + mean_log_u2(sample) + (2.0 * PI).ln())
}

/// Reference NLL for the same uncertainties, with `<Z²>` set to 1.
pub fn nll_ref(sample: &PairedSample) -> f64 {
    0.5 * (1.0 + mean_log_u2(sample) + (2.0 * PI).ln())
}

/// Expected normalized calibration error: mean over bins of |RCE|.
pub fn ence(sample: &PairedSample, binning: &BinningConfig) -> Result<f64> {
    Ok(ence_with_layout(sample, &binning.layout(sample)?))
}

/// ENCE over a precomputed layout (the layout must index into `sample`).
pub fn ence_with_layout(sample: &PairedSample, layout: &BinLayout) -> f64 {
    if layout.bin_count() == 1 {
        // same summation order as `rce`, so one bin gives |RCE| exactly
        return rce(sample).abs();
    }
    let total: f64 = layout.bins().map(|bin| rce_of(sample, bin.iter().copied()).abs()).sum();
    total / layout.bin_count() as f64
}

/// Mean over bins of |ln ZMS_i|.
pub fn zmse(sample: &PairedSample, binning: &BinningConfig) -> Result<f64> {
    zmse_with_layout(sample, &binning.layout(sample)?)
}

pub fn zmse_with_layout(sample: &PairedSample, layout: &BinLayout) -> Result<f64> {
    let mut total = 0.0;
    for (bin, idx) in layout.bins().enumerate() {
        let z = zms_of(sample, idx);
        if z == 0.0 {
            return Err(Error::ZeroBinZms { bin });
        }
        total += z.ln().abs();
    }
    Ok(total / layout.bin_count() as f64)
}

/// Per-bin ZMS values, in bin order.
pub fn binned_zms(sample: &PairedSample, binning: &BinningConfig) -> Result<Vec<f64>> {
    let layout = binning.layout(sample)?;
    Ok(layout.bins().map(|idx| zms_of(sample, idx)).collect())
}

/// Per-bin RCE values, in bin order.
pub fn binned_rce(sample: &PairedSample, binning: &BinningConfig) -> Result<Vec<f64>> {
    let layout = binning.layout(sample)?;
    Ok(layout.bins().map(|idx| rce_of(sample, idx.iter().copied())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(e: &[f64], u: &[f64]) -> PairedSample {
        PairedSample::new(e.to_vec(), u.to_vec()).unwrap()
    }

    fn tiny(bins: usize) -> BinningConfig {
        BinningConfig::new(bins)
    }

    #[test]
    fn zms_values() {
        let u = [0.5, 1.0, 2.0, 4.0];
        assert_eq!(zms(&sample(&u, &u)), 1.0);
        let e: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        assert_eq!(zms(&sample(&e, &u)), 4.0);
        assert_relative_eq!(zms(&sample(&[1.0, -2.0, 3.0], &[1.0; 3])), 14.0 / 3.0);
    }

    #[test]
    fn rce_values() {
        let u = [0.5, 1.0, 2.0];
        assert_eq!(rce(&sample(&u, &u)), 0.0);
        let e: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        assert_relative_eq!(rce(&sample(&e, &u)), -1.0);
        assert_relative_eq!(rce(&sample(&[0.0, 2f64.sqrt()], &[1.0, 1.0])), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn nll_values() {
        let s = sample(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]);
        let expected = 0.5 * (1.0 + (2.0 * PI).ln());
        assert_relative_eq!(nll(&s), expected);
        assert_relative_eq!(nll(&s), 1.418_938_533_204_672_7, epsilon = 1e-12);
        assert_relative_eq!(nll_ref(&s), expected);

        let s = sample(&[0.3, -2.0, 1.1, 0.05], &[0.5, 1.5, 0.7, 0.2]);
        assert_relative_eq!(nll(&s) - nll_ref(&s), 0.5 * (zms(&s) - 1.0), epsilon = 1e-14);
    }

    #[test]
    fn ence_values() {
        let u = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        assert_eq!(ence(&sample(&u, &u), &tiny(3)).unwrap(), 0.0);

        let s = sample(&[0.3, -0.1, 2.0, 0.4], &[0.5, 0.4, 1.0, 0.9]);
        assert_eq!(ence(&s, &tiny(1)).unwrap(), rce(&s).abs());

        // Bin 1 (u=1,1): RMSE=0.8 -> RCE=+0.2. Bin 2 (u=2,2): RMSE=2.8 -> RCE=-0.4.
        let s = sample(&[0.8, -0.8, 2.8, -2.8], &[1.0, 1.0, 2.0, 2.0]);
        let per_bin = binned_rce(&s, &tiny(2)).unwrap();
        assert_relative_eq!(per_bin[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(per_bin[1], -0.4, epsilon = 1e-12);
        assert_relative_eq!(ence(&s, &tiny(2)).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn ence_bin_errors() {
        let u = [0.1, 0.2, 0.3];
        let s = sample(&u, &u);
        assert!(matches!(ence(&s, &tiny(4)), Err(Error::TooManyBins { .. })));
        assert!(matches!(
            ence(&s, &BinningConfig::new(2).with_min_bin_size(2)),
            Err(Error::BinTooSmall { .. })
        ));
    }

    #[test]
    fn zmse_values() {
        let u = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(zmse(&sample(&u, &u), &tiny(2)).unwrap(), 0.0);

        // bin ZMS = e and 1
        let a = std::f64::consts::E.sqrt();
        let s = sample(&[a, -a, 2.0, -2.0], &[1.0, 1.0, 2.0, 2.0]);
        assert_relative_eq!(zmse(&s, &tiny(2)).unwrap(), 0.5, epsilon = 1e-14);

        // ZMS 2 and 0.5 contribute equally
        let s = sample(
            &[2f64.sqrt(), 2f64.sqrt(), 0.5f64.sqrt() * 3.0, 0.5f64.sqrt() * 3.0],
            &[1.0, 1.0, 3.0, 3.0],
        );
        assert_relative_eq!(zmse(&s, &tiny(2)).unwrap(), 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn zmse_zero_bin() {
        let s = sample(&[0.0, 0.0, 1.0, 1.0], &[1.0, 1.0, 2.0, 2.0]);
        assert!(matches!(zmse(&s, &tiny(2)), Err(Error::ZeroBinZms { bin: 0 })));
    }
}
