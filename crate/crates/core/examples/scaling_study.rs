//! Reference ENCE and ZMSE against sqrt(N/M) for the NIG model on a
//! reduced design.

use uqcal::generative::SyntheticModel;
use uqcal::validation::{scaling_study, ScalingDesign, ScalingOptions};

fn main() -> uqcal::Result<()> {
    let study = scaling_study(
        SyntheticModel::Nig,
        &ScalingDesign::reduced(),
        &ScalingOptions::new(100, 1),
    )?;
    for fit in [&study.ence, &study.zmse] {
        print!(
            "{:<5} {:.4} + {:.4} x  (slope se {:.4})",
            fit.statistic, fit.intercept, fit.slope, fit.slope_se
        );
        if let Some(beta) = fit.m_exponent {
            print!(", M exponent {beta:+.3}");
        }
        println!(", reduced χ² {:.2}", fit.reduced_chi2);
    }
    Ok(())
}
