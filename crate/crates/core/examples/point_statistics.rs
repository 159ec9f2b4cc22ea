//! Point estimates of the calibration statistics on a synthetic dataset.

use uqcal::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
use uqcal::stats::{ence, nll, nll_ref, rce, spearman_cc, zms, zmse, BinningConfig};

fn main() -> uqcal::Result<()> {
    let spec = SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 5000)?;
    let sample = gen_synthetic(&spec, 1);
    let bins = BinningConfig::new(20);

    println!("M      = {}", sample.len());
    println!("ZMS    = {:.4}", zms(&sample));
    println!("RCE    = {:.4}", rce(&sample));
    println!("CC     = {:.4}", spearman_cc(&sample)?);
    println!("ENCE   = {:.4}  ({} bins)", ence(&sample, &bins)?, bins.bins);
    println!("ZMSE   = {:.4}", zmse(&sample, &bins)?);
    println!("NLL    = {:.4}  (reference {:.4})", nll(&sample), nll_ref(&sample));
    Ok(())
}
