//! Monte-Carlo reference values of ENCE for the observed uncertainties,
//! under normal and Student-t errors.

use uqcal::generative::{gen_synthetic, GenerativeSpec, SyntheticModel, SyntheticModelSpec};
use uqcal::resampling::{simulate_reference_for, McOptions};
use uqcal::stats::{BinningConfig, StatisticKind};

fn main() -> uqcal::Result<()> {
    let sample = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 2000)?, 3);
    let stat = StatisticKind::Ence(BinningConfig::new(20));
    let estimate = stat.evaluate(&sample)?;
    println!("ENCE estimate {estimate:.4}");

    for d in [GenerativeSpec::Normal, GenerativeSpec::t6()] {
        let r = simulate_reference_for(&sample, &stat, d, &McOptions::new(2000, 7))?;
        println!(
            "  {d:<6} reference {:.4} ± {:.4}  95% [{:.4}, {:.4}]",
            r.mean, r.standard_error, r.interval.lower, r.interval.upper
        );
    }
    Ok(())
}
