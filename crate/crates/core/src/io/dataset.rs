use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::PairedSample;

/// A sample together with the names of its feature columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub sample: PairedSample,
    pub feature_names: Vec<String>,
}

/// Reads a CSV file with header columns `E` and `uE` (any case). Other
/// columns are kept, in file order, as features for feature binning.
///
/// Row indices in errors count data rows from 0.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<PairedSample> {
    read_table(path).map(|d| d.sample)
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(file, path)
}

fn parse_table(reader: impl Read, path: &Path) -> Result<Dataset> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyFile);
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let ie = find("E")?;
    let iu = find("uE")?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != ie && c != iu).collect();

    let mut errors = Vec::new();
    let mut uncertainties = Vec::new();
    let mut features = vec![Vec::new(); feature_cols.len()];
    for (index, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let field = |col: usize| -> Result<f64> {
            record
                .get(col)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NonFiniteValue {
                    index,
                    column: headers[col].to_string(),
                })
        };
        let e = field(ie)?;
        let u = field(iu)?;
        if u <= 0.0 {
            return Err(Error::NonPositiveUncertainty { index, value: u });
        }
        errors.push(e);
        uncertainties.push(u);
        for (slot, &c) in features.iter_mut().zip(&feature_cols) {
            slot.push(field(c)?);
        }
    }
    if errors.is_empty() {
        return Err(Error::EmptyFile);
    }
    log::debug!(
        "{}: {} rows, {} feature columns",
        path.display(),
        errors.len(),
        features.len()
    );
    Ok(Dataset {
        sample: PairedSample::with_features(errors, uncertainties, features)?,
        feature_names: feature_cols.iter().map(|&c| headers[c].to_string()).collect(),
    })
}

/// Writes `E,uE` plus unnamed features as `f0, f1, ...`. Values use the
/// shortest representation that parses back to the same double.
pub fn write_dataset(path: impl AsRef<Path>, sample: &PairedSample) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_dataset_to(file, sample).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_dataset_to(writer: impl Write, sample: &PairedSample) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["E".to_string(), "uE".to_string()];
    header.extend((0..sample.features().len()).map(|k| format!("f{k}")));
    w.write_record(&header)?;
    for i in 0..sample.len() {
        let mut row = vec![sample.errors()[i].to_string(), sample.uncertainties()[i].to_string()];
        row.extend(sample.features().iter().map(|f| f[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
