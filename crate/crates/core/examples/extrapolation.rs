//! Extrapolate binned ZMSE and ENCE to zero bins. A calibrated dataset
//! gives an intercept interval that contains 0.

use uqcal::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
use uqcal::stats::PairedSample;
use uqcal::validation::{extrapolate_to_zero_bins, BinnedStatistic, ExtrapolationSettings};

fn main() -> uqcal::Result<()> {
    let calibrated = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 5000)?, 6);
    // errors inflated by 30%
    let e: Vec<f64> = calibrated.errors().iter().map(|e| 1.3 * e).collect();
    let inflated = PairedSample::new(e, calibrated.uncertainties().to_vec())?;

    let settings = ExtrapolationSettings::default();
    for (label, sample) in [("calibrated", &calibrated), ("inflated", &inflated)] {
        for stat in [BinnedStatistic::Zmse, BinnedStatistic::Ence] {
            let x = extrapolate_to_zero_bins(sample, stat, &settings)?;
            let ci = &x.intercept_interval;
            println!(
                "{label:<10} {:<4}  intercept {:+.4} [{:+.4}, {:+.4}]  consistent: {}",
                stat.name(),
                x.intercept,
                ci.lower,
                ci.upper,
                x.consistent
            );
        }
    }
    Ok(())
}
