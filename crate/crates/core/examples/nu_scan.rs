//! How the simulated reference of a statistic moves with the tail weight
//! of the error distribution.

use uqcal::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
use uqcal::resampling::McOptions;
use uqcal::stats::{BinningConfig, StatisticKind};
use uqcal::validation::{default_nu_grid, scan_nu};

fn main() -> uqcal::Result<()> {
    let sample = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 2000)?, 5);
    let options = McOptions::new(500, 3);
    for stat in [StatisticKind::Zms, StatisticKind::Ence(BinningConfig::new(20))] {
        println!("{stat}");
        for p in scan_nu(&sample, &stat, &default_nu_grid(), &options)? {
            println!("  ν = {:>5.1}  {:.4} ± {:.4}", p.nu, p.mean, p.standard_error);
        }
    }
    Ok(())
}
