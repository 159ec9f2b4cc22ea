//! Full validation of several statistics, including the sensitivity gate
//! for statistics without a predefined reference.

use uqcal::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
use uqcal::stats::{BinningConfig, StatisticKind};
use uqcal::validation::{fitness_screening, validate, ValidationConfig};

fn main() -> uqcal::Result<()> {
    let sample = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 3000)?, 4);
    let config = ValidationConfig {
        n_mc: 2000,
        bootstrap_replicates: 500,
        seed: 11,
        ..ValidationConfig::default()
    };

    let screening = fitness_screening(&sample);
    for w in &screening.warnings {
        println!("warning: {w}");
    }

    let bins = BinningConfig::new(20);
    for stat in [
        StatisticKind::Zms,
        StatisticKind::Rce,
        StatisticKind::Cc,
        StatisticKind::Ence(bins),
        StatisticKind::Zmse(bins),
    ] {
        let report = validate(&sample, &stat, &config);
        println!("{stat}: {:?} via {:?}", report.verdict, report.route);
        for z in &report.zeta_scores {
            match z.zeta {
                Some(v) => println!("    {:<5} ζ = {v:+.3}", z.scheme.name()),
                None => println!("    {:<5} ζ indeterminate", z.scheme.name()),
            }
        }
        if let Some(gate) = &report.sensitivity_gate {
            println!(
                "    gate: gap {:+.4} = {:.1} se, over-sensitive: {}",
                gate.difference,
                gate.difference.abs() / gate.combined_standard_error,
                gate.over_sensitive
            );
        }
    }
    Ok(())
}
