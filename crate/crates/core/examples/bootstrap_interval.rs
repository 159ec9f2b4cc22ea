//! BCa bootstrap intervals for ZMS and ENCE.

use uqcal::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
use uqcal::resampling::{bootstrap_ci, BootstrapOptions};
use uqcal::stats::{BinningConfig, StatisticKind};

fn main() -> uqcal::Result<()> {
    let sample = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 2000)?, 2);
    let options = BootstrapOptions::new(1000, 42).with_level(0.95);

    for stat in [StatisticKind::Zms, StatisticKind::Ence(BinningConfig::new(20))] {
        let ci = bootstrap_ci(&sample, &stat, &options)?;
        println!(
            "{stat}: {:.4}  [{:.4}, {:.4}]  bias {:+.4}",
            ci.point, ci.lower, ci.upper, ci.bias
        );
    }
    Ok(())
}
