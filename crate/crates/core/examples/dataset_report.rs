//! Write a dataset to CSV, read it back, and summarize it into a report.

use uqcal::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
use uqcal::io::{read_dataset, summarize, write_dataset, Report, RunConfig};

fn main() -> uqcal::Result<()> {
    let dir = std::env::temp_dir().join("uqcal-example");
    std::fs::create_dir_all(&dir).map_err(|source| uqcal::Error::Io {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join("nig.csv");

    let sample = gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, 1000)?, 9);
    write_dataset(&path, &sample)?;
    let back = read_dataset(&path)?;
    assert_eq!(back, sample);
    println!("wrote and re-read {} rows at {}", back.len(), path.display());

    let mut report = Report::new("summarize", RunConfig::default());
    report.datasets.push(summarize("nig", &back));
    println!("{}", report.to_json());
    Ok(())
}
