//! Command-line front end. [`cli_main`] returns the process exit code:
//! 0 on success (whatever the verdicts), 1 on data or runtime errors and
//! 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::generative::{gen_synthetic, GenerativeSpec, SyntheticModel, SyntheticModelSpec};
use crate::io::{
    emit_plot_data, read_dataset, summarize, write_dataset_to, DatasetValidation, ExtrapolationEntry, NuScan,
    ReferenceEntry, Report, ReportFormat, RunConfig, StatisticEstimate, Timing,
};
use crate::resampling::{bootstrap_ci, simulate_reference_for, Execution, McOptions};
use crate::stats::{BinVariable, PairedSample};
use crate::validation::{
    extrapolate_to_zero_bins_with, scaling_study, scan_nu, validate, BinnedStatistic, ScalingDesign, ScalingOptions,
    Verdict,
};

const ALL_STATISTICS: [&str; 6] = ["ZMS", "CC", "RCE", "ENCE", "ZMSE", "NLL"];

#[derive(Parser, Debug)]
#[command(
    name = "uqcal",
    version,
    about = "Validate calibration statistics of ML uncertainties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run all replicate loops on the calling thread.
    #[arg(long, global = true, conflicts_with = "threads")]
    serial: bool,

    /// Size of the worker pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Master seed.
    #[arg(long, global = true, env = "UQCAL_SEED")]
    seed: Option<u64>,

    /// Base run configuration (JSON); command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<ReportFormat>,

    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Directory for plot data files.
    #[arg(long, global = true)]
    plots_dir: Option<PathBuf>,

    /// Leave the timing block out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Point estimates with bootstrap confidence intervals.
    Stats(StatsArgs),
    /// Dataset screening: β_GM shape flags and Student-t fit of the z-scores.
    Summarize(DataArgs),
    /// Full validation workflow with ζ-scores and verdicts.
    Validate(ValidateArgs),
    /// Monte-Carlo reference values under chosen generative distributions.
    Simulate(SimulateArgs),
    /// Reference values over a grid of Student-t degrees of freedom.
    ScanNu(ScanNuArgs),
    /// Size and bin-count dependence of ENCE/ZMSE for a synthetic model.
    Scaling(ScalingArgs),
    /// Regress a binned statistic on (N/M)^1/2 and test the intercept.
    Extrapolate(ExtrapolateArgs),
    /// Write a calibrated synthetic dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Input CSV with columns E and uE (repeatable).
    #[arg(long, short, required = true)]
    input: Vec<PathBuf>,

    /// Dataset label, one per input (default: file stem).
    #[arg(long)]
    label: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct StatArgs {
    /// Statistic(s): zms, cc, rce, ence, zmse, nll (repeatable or comma-separated).
    #[arg(long = "stat", value_delimiter = ',')]
    stats: Vec<String>,

    /// Number of bins for ENCE/ZMSE.
    #[arg(long)]
    bins: Option<usize>,

    #[arg(long)]
    min_bin_size: Option<usize>,

    /// Bin on this feature column instead of the uncertainty.
    #[arg(long)]
    bin_feature: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    stat: StatArgs,
    /// Bootstrap replicates.
    #[arg(long)]
    boot: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ValidateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    stat: StatArgs,
    #[arg(long)]
    boot: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
    /// Monte-Carlo sample size.
    #[arg(long)]
    nmc: Option<usize>,
    /// Known generative distribution: normal, t6 or t:<nu>.
    #[arg(long, value_parser = parse_dist)]
    dist: Option<GenerativeSpec>,
    /// Sensitivity gate multiplier.
    #[arg(long)]
    k: Option<f64>,
    /// Also report simulation schemes for statistics with a fixed reference.
    #[arg(long)]
    all_schemes: bool,
}

#[derive(Args, Debug, Clone)]
struct SimulateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    stat: StatArgs,
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    nmc: Option<usize>,
    /// Generative distribution(s) (default: the two gate candidates).
    #[arg(long, value_parser = parse_dist, value_delimiter = ',')]
    dist: Vec<GenerativeSpec>,
}

#[derive(Args, Debug, Clone)]
struct ScanNuArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    stat: StatArgs,
    #[arg(long)]
    nmc: Option<usize>,
    /// Degrees of freedom to scan (default 3..=20).
    #[arg(long, value_delimiter = ',')]
    nu_grid: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
struct ScalingArgs {
    /// Synthetic model: nig or t6ig.
    #[arg(long, value_parser = parse_model, default_value = "nig")]
    model: SyntheticModel,
    #[arg(long)]
    nmc: Option<usize>,
    /// Use the small grid M {2000, 8000, 16000}, N {10, 30, 50}, ν {6, 24}.
    #[arg(long)]
    reduced: bool,
    #[arg(long, value_delimiter = ',')]
    m_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    nu_grid: Vec<f64>,
    #[arg(long)]
    level: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ExtrapolateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// ence and/or zmse (default zmse).
    #[arg(long = "stat", value_delimiter = ',')]
    stats: Vec<String>,
    #[arg(long)]
    min_bin_size: Option<usize>,
    #[arg(long)]
    bin_feature: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    n_step: Option<usize>,
    /// Only bin counts above this enter the fit.
    #[arg(long)]
    fit_above: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
    /// Bootstrap resamples for the intercept interval (0: least-squares interval).
    #[arg(long)]
    boot: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SynthArgs {
    #[arg(long, value_parser = parse_model, default_value = "nig")]
    model: SyntheticModel,
    /// Degrees of freedom of the inverse-gamma uncertainty distribution.
    #[arg(long)]
    nu: Option<f64>,
    /// Number of points.
    #[arg(short = 'M', long = "size")]
    size: Option<usize>,
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dist(s: &str) -> std::result::Result<GenerativeSpec, String> {
    GenerativeSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<SyntheticModel, String> {
    SyntheticModel::parse(s).map_err(|e| e.to_string())
}

/// A failure together with the exit code it maps to.
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            2
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    config.emit_plots = cli.plots_dir.is_some();
    let execution = if cli.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(if cli.serial { 1 } else { cli.threads.unwrap_or(0) })
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let threads = pool.current_num_threads();
    let start = Instant::now();

    if let Command::Synth(args) = &cli.command {
        return pool.install(|| synth(cli, config, args));
    }
    let mut report = pool.install(|| execute(&cli.command, config, execution))?;
    if !cli.no_timing {
        report.timing = Some(Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
            threads,
        });
    }
    print_summary(&report);
    emit(&report.render(report.config.format), cli.out.as_deref())?;
    if let Some(dir) = &cli.plots_dir {
        let files = emit_plot_data(&report, dir)?;
        log::info!("wrote {} plot files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn load(data: &DataArgs) -> std::result::Result<Vec<(String, PairedSample)>, Failure> {
    if !data.label.is_empty() && data.label.len() != data.input.len() {
        return Err(Failure::Usage(format!(
            "{} labels given for {} inputs",
            data.label.len(),
            data.input.len()
        )));
    }
    data.input
        .iter()
        .enumerate()
        .map(|(i, path)| {
            let label = data.label.get(i).cloned().unwrap_or_else(|| {
                path.file_stem()
                    .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
            });
            Ok((label, read_dataset(path)?))
        })
        .collect()
}

fn apply_stat_args(config: &mut RunConfig, args: &StatArgs, default: &[&str]) {
    config.statistics = if args.stats.is_empty() {
        default.iter().map(|s| s.to_string()).collect()
    } else {
        args.stats.iter().map(|s| s.trim().to_ascii_uppercase()).collect()
    };
    if let Some(n) = args.bins {
        config.bins = n;
    }
    if let Some(n) = args.min_bin_size {
        config.min_bin_size = n;
    }
    if let Some(k) = args.bin_feature {
        config.bin_variable = BinVariable::Feature(k);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn execute(command: &Command, mut config: RunConfig, execution: Execution) -> std::result::Result<Report, Failure> {
    let usage = |e: Error| Failure::Usage(e.to_string());
    match command {
        Command::Stats(a) => {
            apply_stat_args(&mut config, &a.stat, &ALL_STATISTICS);
            set(&mut config.bootstrap_replicates, a.boot);
            set(&mut config.level, a.level);
            let kinds = config.statistic_kinds().map_err(usage)?;
            let sets = load(&a.data)?;
            let options = config.validation_config(execution).bootstrap_options();
            let mut report = Report::new("stats", config);
            for (label, sample) in &sets {
                for kind in &kinds {
                    let (interval, error) = match bootstrap_ci(sample, kind, &options) {
                        Ok(iv) => (Some(iv), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    report.estimates.push(StatisticEstimate {
                        dataset: label.clone(),
                        statistic: *kind,
                        interval,
                        error,
                    });
                }
            }
            Ok(report)
        }
        Command::Summarize(data) => {
            let sets = load(data)?;
            let mut report = Report::new("summarize", config);
            for (label, sample) in &sets {
                let s = summarize(label, sample);
                report
                    .warnings
                    .extend(s.screening.warnings.iter().map(|w| format!("{label}: {w}")));
                report.datasets.push(s);
            }
            Ok(report)
        }
        Command::Validate(a) => {
            apply_stat_args(&mut config, &a.stat, &["ZMS"]);
            set(&mut config.bootstrap_replicates, a.boot);
            set(&mut config.level, a.level);
            set(&mut config.n_mc, a.nmc);
            set(&mut config.sensitivity_k, a.k);
            if a.dist.is_some() {
                config.declared = a.dist;
            }
            config.all_schemes |= a.all_schemes;
            let kinds = config.statistic_kinds().map_err(usage)?;
            let sets = load(&a.data)?;
            let vc = config.validation_config(execution);
            let mut report = Report::new("validate", config);
            for (label, sample) in &sets {
                let summary = summarize(label, sample);
                report
                    .warnings
                    .extend(summary.screening.warnings.iter().map(|w| format!("{label}: {w}")));
                report.datasets.push(summary);
                report.validations.push(DatasetValidation {
                    dataset: label.clone(),
                    reports: kinds.iter().map(|k| validate(sample, k, &vc)).collect(),
                });
            }
            Ok(report)
        }
        Command::Simulate(a) => {
            apply_stat_args(&mut config, &a.stat, &["ZMS"]);
            set(&mut config.level, a.level);
            set(&mut config.n_mc, a.nmc);
            let dists = if a.dist.is_empty() {
                vec![config.candidates.0, config.candidates.1]
            } else {
                a.dist.clone()
            };
            if let [d] = dists[..] {
                config.declared = Some(d);
            }
            let kinds = config.statistic_kinds().map_err(usage)?;
            let sets = load(&a.data)?;
            let vc = config.validation_config(execution);
            let mut report = Report::new("simulate", config);
            for (label, sample) in &sets {
                for kind in &kinds {
                    for &d in &dists {
                        let r = simulate_reference_for(sample, kind, d, &vc.mc_options(d))?;
                        report.references.push(ReferenceEntry {
                            dataset: label.clone(),
                            statistic: *kind,
                            theta_est: kind.evaluate(sample).ok(),
                            reference: r.summary(),
                        });
                    }
                }
            }
            Ok(report)
        }
        Command::ScanNu(a) => {
            apply_stat_args(&mut config, &a.stat, &["ZMS"]);
            set(&mut config.n_mc, a.nmc);
            if !a.nu_grid.is_empty() {
                config.nu_grid = a.nu_grid.clone();
            }
            let kinds = config.statistic_kinds().map_err(usage)?;
            let sets = load(&a.data)?;
            let options = McOptions::new(config.n_mc, config.seed)
                .with_level(config.level)
                .with_execution(execution);
            let mut report = Report::new("scan-nu", config);
            for (label, sample) in &sets {
                for kind in &kinds {
                    let points = scan_nu(sample, kind, &report.config.nu_grid, &options)?;
                    report.nu_scans.push(NuScan {
                        dataset: label.clone(),
                        statistic: *kind,
                        theta_est: kind.evaluate(sample).ok(),
                        points,
                    });
                }
            }
            Ok(report)
        }
        Command::Scaling(a) => {
            config.model = Some(a.model);
            set(&mut config.n_mc, a.nmc);
            set(&mut config.level, a.level);
            if a.reduced {
                config.scaling = ScalingDesign::reduced();
            }
            if !a.m_grid.is_empty() {
                config.scaling.m_grid = a.m_grid.clone();
            }
            if !a.n_grid.is_empty() {
                config.scaling.n_grid = a.n_grid.clone();
            }
            if !a.nu_grid.is_empty() {
                config.scaling.nu_grid = a.nu_grid.clone();
            }
            config.statistics = vec!["ENCE".into(), "ZMSE".into()];
            let options = ScalingOptions {
                level: config.level,
                ..ScalingOptions::new(config.n_mc, config.seed).with_execution(execution)
            };
            let study = scaling_study(a.model, &config.scaling, &options)?;
            let mut report = Report::new("scaling", config);
            report.scaling = Some(study);
            Ok(report)
        }
        Command::Extrapolate(a) => {
            let stats = if a.stats.is_empty() {
                vec!["zmse".to_string()]
            } else {
                a.stats.clone()
            };
            let kinds = stats
                .iter()
                .map(|s| match s.trim().to_ascii_lowercase().as_str() {
                    "ence" => Ok(BinnedStatistic::Ence),
                    "zmse" => Ok(BinnedStatistic::Zmse),
                    other => Err(Failure::Usage(format!(
                        "extrapolate supports ence and zmse, not `{other}`"
                    ))),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            config.statistics = kinds.iter().map(|k| k.name().to_string()).collect();
            let x = &mut config.extrapolation;
            set(&mut x.min_bin_size, a.min_bin_size);
            set(&mut x.n_min, a.n_min);
            set(&mut x.n_max, a.n_max);
            set(&mut x.n_step, a.n_step);
            set(&mut x.fit_above, a.fit_above);
            set(&mut x.level, a.level);
            set(&mut x.bootstrap_replicates, a.boot);
            x.seed = config.seed;
            if let Some(k) = a.bin_feature {
                x.variable = BinVariable::Feature(k);
            }
            config.min_bin_size = x.min_bin_size;
            config.level = x.level;
            let settings = config.extrapolation;
            let sets = load(&a.data)?;
            let mut report = Report::new("extrapolate", config);
            for (label, sample) in &sets {
                for &kind in &kinds {
                    report.extrapolations.push(ExtrapolationEntry {
                        dataset: label.clone(),
                        extrapolation: extrapolate_to_zero_bins_with(sample, kind, &settings, execution)?,
                    });
                }
            }
            Ok(report)
        }
        Command::Synth(_) => unreachable!("handled before dispatch"),
    }
}

fn synth(cli: &Cli, mut config: RunConfig, args: &SynthArgs) -> std::result::Result<(), Failure> {
    set(&mut config.nu, args.nu);
    set(&mut config.size, args.size);
    let spec =
        SyntheticModelSpec::new(args.model, config.nu, config.size).map_err(|e| Failure::Usage(e.to_string()))?;
    let sample = gen_synthetic(&spec, config.seed);
    let mut buf = Vec::new();
    write_dataset_to(&mut buf, &sample).map_err(|source| Error::Csv {
        path: cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    })?;
    emit(
        std::str::from_utf8(&buf).expect("csv output is utf-8"),
        cli.out.as_deref(),
    )?;
    Ok(())
}

/// Human-readable verdict lines on stderr; the report itself goes to
/// `--out` or stdout.
fn print_summary(report: &Report) {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for v in &report.validations {
        for r in &v.reports {
            let verdict = match r.verdict {
                Verdict::Validated => "validated",
                Verdict::Rejected => "rejected",
                Verdict::CannotValidate => "cannot validate",
                Verdict::Indeterminate => "indeterminate",
            };
            let zetas: Vec<String> = r
                .zeta_scores
                .iter()
                .map(|z| match z.zeta {
                    Some(v) => format!("{}={v:.3}", z.scheme.name()),
                    None => format!("{}=n/a", z.scheme.name()),
                })
                .collect();
            let extra = r.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
            eprintln!(
                "{} {}: {verdict} [{}]{extra}",
                v.dataset,
                r.statistic.name(),
                zetas.join(", ")
            );
        }
    }
    if let Some(s) = &report.scaling {
        for f in [&s.ence, &s.zmse] {
            eprintln!(
                "{} {}: {:.4} + {:.4} (N/M)^1/2  (slope se {:.4})",
                s.model.name(),
                f.statistic,
                f.intercept,
                f.slope,
                f.slope_se
            );
        }
    }
    for e in &report.extrapolations {
        let x = &e.extrapolation;
        eprintln!(
            "{} {}: intercept {:.4} [{:.4}, {:.4}] -> {}",
            e.dataset,
            x.statistic.name(),
            x.intercept,
            x.intercept_interval.lower,
            x.intercept_interval.upper,
            if x.consistent { "consistent" } else { "inconsistent" }
        );
    }
}
