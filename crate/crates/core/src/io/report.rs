use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::generative::{fit_student_z, GenerativeSpec, SyntheticModel, ZFit};
use crate::resampling::{Execution, IntervalEstimate, ReferenceSummary};
use crate::stats::{BinVariable, BinningConfig, PairedSample, StatisticKind};
use crate::validation::{
    default_nu_grid, fitness_screening, Extrapolation, ExtrapolationSettings, NuScanPoint, ScalingDesign, ScalingStudy,
    Screening, ValidationConfig, ValidationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidConfig(format!("unknown report format `{other}`"))),
        }
    }
}

/// Everything that determines the numbers in a report. Execution mode and
/// output paths are deliberately absent: they never change the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub statistics: Vec<String>,
    pub bins: usize,
    pub min_bin_size: usize,
    pub bin_variable: BinVariable,
    pub candidates: (GenerativeSpec, GenerativeSpec),
    pub declared: Option<GenerativeSpec>,
    pub n_mc: usize,
    pub bootstrap_replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub sensitivity_k: f64,
    pub all_schemes: bool,
    pub format: ReportFormat,
    pub emit_plots: bool,
    pub model: Option<SyntheticModel>,
    /// ν of the uncertainty distribution for `synth`.
    pub nu: f64,
    /// Dataset size for `synth`.
    pub size: usize,
    pub nu_grid: Vec<f64>,
    pub scaling: ScalingDesign,
    pub extrapolation: ExtrapolationSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = ValidationConfig::default();
        Self {
            statistics: vec!["ZMS".into()],
            bins: 20,
            min_bin_size: 1,
            bin_variable: BinVariable::Uncertainty,
            candidates: v.candidates,
            declared: v.declared,
            n_mc: v.n_mc,
            bootstrap_replicates: v.bootstrap_replicates,
            level: v.level,
            seed: v.seed,
            sensitivity_k: v.sensitivity_k,
            all_schemes: v.all_schemes,
            format: ReportFormat::Json,
            emit_plots: false,
            model: None,
            nu: 6.0,
            size: 5000,
            nu_grid: default_nu_grid(),
            scaling: ScalingDesign::default(),
            extrapolation: ExtrapolationSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn binning(&self) -> BinningConfig {
        BinningConfig::new(self.bins)
            .with_min_bin_size(self.min_bin_size)
            .with_variable(self.bin_variable)
    }

    pub fn statistic_kinds(&self) -> Result<Vec<StatisticKind>> {
        self.statistics
            .iter()
            .map(|s| StatisticKind::parse(s, self.binning()))
            .collect()
    }

    pub fn validation_config(&self, execution: Execution) -> ValidationConfig {
        ValidationConfig {
            bootstrap_replicates: self.bootstrap_replicates,
            level: self.level,
            n_mc: self.n_mc,
            seed: self.seed,
            declared: self.declared,
            candidates: self.candidates,
            sensitivity_k: self.sensitivity_k,
            all_schemes: self.all_schemes,
            execution,
        }
    }
}

/// Per-dataset screening: size, β_GM shape flags and the Student-t fit of Z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub dataset: String,
    pub m: usize,
    pub screening: Screening,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zfit: Option<ZFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zfit_error: Option<String>,
}

pub fn summarize(label: &str, sample: &PairedSample) -> DatasetSummary {
    let (zfit, zfit_error) = match fit_student_z(sample) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    DatasetSummary {
        dataset: label.to_string(),
        m: sample.len(),
        screening: fitness_screening(sample),
        zfit,
        zfit_error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticEstimate {
    pub dataset: String,
    pub statistic: StatisticKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetValidation {
    pub dataset: String,
    pub reports: Vec<ValidationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub dataset: String,
    pub statistic: StatisticKind,
    pub theta_est: Option<f64>,
    pub reference: ReferenceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuScan {
    pub dataset: String,
    pub statistic: StatisticKind,
    pub theta_est: Option<f64>,
    pub points: Vec<NuScanPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationEntry {
    pub dataset: String,
    pub extrapolation: Extrapolation,
}

/// Wall-clock information; the only part of a report that varies between
/// identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub datasets: Vec<DatasetSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<StatisticEstimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub validations: Vec<DatasetValidation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<ReferenceEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nu_scans: Vec<NuScan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingStudy>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extrapolations: Vec<ExtrapolationEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            datasets: Vec::new(),
            estimates: Vec::new(),
            validations: Vec::new(),
            references: Vec::new(),
            nu_scans: Vec::new(),
            scaling: None,
            extrapolations: Vec::new(),
            warnings: Vec::new(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    /// One `path,value` row per leaf, values written as JSON literals so
    /// that [`Report::from_csv`] restores the report exactly.
    pub fn to_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report values are finite");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path", "value"]).expect("in-memory write");
        for (path, v) in rows {
            w.write_record([path, v]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidConfig(format!("malformed CSV report: {msg}"));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut root = Value::Null;
        for record in rdr.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let (path, literal) = (&record[0], &record[1]);
            let leaf: Value = serde_json::from_str(literal).map_err(|e| bad(format!("{path}: {e}")))?;
            let segments: Vec<&str> = if path.is_empty() {
                Vec::new()
            } else {
                path.split('.').collect()
            };
            insert(&mut root, &segments, leaf);
        }
        serde_json::from_value(root).map_err(|e| bad(e.to_string()))
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) if !map.is_empty() => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        leaf => out.push((prefix.to_string(), leaf.to_string())),
    }
}

fn insert(node: &mut Value, segments: &[&str], leaf: Value) {
    let Some((head, rest)) = segments.split_first() else {
        *node = leaf;
        return;
    };
    if let Ok(i) = head.parse::<usize>() {
        if !node.is_array() {
            *node = Value::Array(Vec::new());
        }
        let items = node.as_array_mut().expect("just made an array");
        if items.len() <= i {
            items.resize(i + 1, Value::Null);
        }
        insert(&mut items[i], rest, leaf);
    } else {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        let map = node.as_object_mut().expect("just made an object");
        insert(map.entry(head.to_string()).or_insert(Value::Null), rest, leaf);
    }
}

pub fn write_report(report: &Report, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, report.render(format)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a report written by [`write_report`]; the format is taken from the
/// extension (`.csv`, anything else is JSON).
pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        Report::from_csv(&text)
    } else {
        Report::from_json(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}
