//! End-to-end acceptance checks. Runs without the libtest harness so that
//! one PASS/FAIL line per criterion is always printed.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use uqcal::generative::{
    fit_student_z_values, gen_synthetic, sample_unit, GenerativeSpec, SyntheticModel, SyntheticModelSpec,
};
use uqcal::resampling::{bootstrap_ci, simulate_reference, BootstrapOptions, McOptions};
use uqcal::stats::{BinningConfig, PairedSample, StatisticKind};
use uqcal::validation::{
    extrapolate_to_zero_bins, scaling_study, sensitivity_gate, validate, zeta, BinnedStatistic, Centering,
    ExtrapolationSettings, ScalingDesign, ScalingOptions, ScalingStudy, Scheme, ValidationConfig, Verdict, ZetaScore,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn nig(nu: f64, m: usize, seed: u64) -> PairedSample {
    gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, nu, m).unwrap(), seed)
}

fn reduced_study(model: SyntheticModel, seed: u64) -> ScalingStudy {
    scaling_study(model, &ScalingDesign::reduced(), &ScalingOptions::new(1000, seed)).unwrap()
}

fn nig_scaling() -> Outcome {
    let s = reduced_study(SyntheticModel::Nig, 20240601);
    let pass = (s.ence.slope - 0.56).abs() <= 0.02 && (s.zmse.slope - 1.14).abs() <= 0.04;
    outcome(
        pass,
        format!(
            "ENCE slope {:.4} (0.56 ± 0.02), ZMSE slope {:.4} (1.14 ± 0.04)",
            s.ence.slope, s.zmse.slope
        ),
    )
}

fn t6ig_scaling() -> Outcome {
    let s = reduced_study(SyntheticModel::T6ig, 20240602);
    let within = |fit: &uqcal::validation::ScalingFit, a: f64, b: f64| {
        ((fit.slope - b) / b).abs() <= 0.05 && (fit.intercept - a).abs() <= 0.004
    };
    let pass = within(&s.ence, 0.004, 0.779) && within(&s.zmse, 0.006, 1.577);
    outcome(
        pass,
        format!(
            "ENCE {:.4} + {:.4}x (0.004 + 0.779x), ZMSE {:.4} + {:.4}x (0.006 + 1.577x); slopes ±5%, intercepts ±0.004",
            s.ence.intercept, s.ence.slope, s.zmse.intercept, s.zmse.slope
        ),
    )
}

fn zms_universality() -> Outcome {
    let sample = nig(6.0, 5000, 31);
    let mut dists = vec![GenerativeSpec::Normal];
    for nu in [3.0, 4.0, 6.0, 12.0, 20.0] {
        dists.push(GenerativeSpec::student_t(nu).unwrap());
    }
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (k, d) in dists.into_iter().enumerate() {
        let r = simulate_reference(
            sample.uncertainties(),
            &StatisticKind::Zms,
            d,
            &McOptions::new(10_000, 3100 + k as u64),
        )
        .unwrap();
        let dev = (r.mean - 1.0).abs() / r.standard_error;
        worst = worst.max(dev);
        parts.push(format!("{}: {:.4}±{:.4}", d.label(), r.mean, r.standard_error));
    }
    outcome(
        worst <= 3.0,
        format!("max |mean-1|/se = {worst:.2} (≤ 3); {}", parts.join(", ")),
    )
}

fn zeta_arithmetic() -> Outcome {
    let a = zeta(0.96, 1.0, (0.87, 1.12), Centering::OnEstimate).unwrap();
    let b = zeta(0.244, 0.045, (0.030, 0.062), Centering::OnReference).unwrap();
    let pass = (a + 0.25).abs() < 1e-12 && (b - 11.7).abs() <= 0.1;
    outcome(
        pass,
        format!("on-estimate {a:.12} (-0.25), on-reference {b:.4} (11.7 ± 0.1)"),
    )
}

fn nig_moments() -> Outcome {
    let s = nig(6.0, 100_000, 5);
    let check = |values: Vec<f64>| {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        (mean, (mean - 1.5).abs() / (sd / n.sqrt()))
    };
    let (me, de) = check(s.errors().iter().map(|e| e * e).collect());
    let (mu, du) = check(s.uncertainties().iter().map(|u| u * u).collect());
    outcome(
        de <= 3.0 && du <= 3.0,
        format!("<E²> = {me:.4} ({de:.2} se), <u²> = {mu:.4} ({du:.2} se); target 1.5 within 3 se"),
    )
}

fn bca_coverage() -> Outcome {
    let trials = 200;
    let mut covered = 0;
    let mut zeta_ok = 0;
    for t in 0..trials {
        let s = nig(6.0, 2000, 60_000 + t);
        let iv = bootstrap_ci(&s, &StatisticKind::Zms, &BootstrapOptions::new(1000, 61_000 + t)).unwrap();
        covered += usize::from(iv.contains(1.0));
        let z = ZetaScore::new(Scheme::Bs, iv.point, 1.0, iv);
        zeta_ok += usize::from(z.valid == Some(true));
    }
    let rate = covered as f64 / trials as f64;
    let zrate = zeta_ok as f64 / trials as f64;
    let pass = (rate - 0.95).abs() <= 0.04 && zeta_ok == covered;
    outcome(
        pass,
        format!("coverage {rate:.3}, |ζ_BS| ≤ 1 rate {zrate:.3} (0.95 ± 0.04) over {trials} trials"),
    )
}

fn sensitivity() -> Outcome {
    let s = nig(6.0, 5000, 70);
    let cfg = ValidationConfig {
        n_mc: 10_000,
        seed: 71,
        ..ValidationConfig::default()
    };
    let ence = StatisticKind::Ence(BinningConfig::new(50));
    let g_ence = sensitivity_gate(s.uncertainties(), &ence, &cfg).unwrap();
    let g_zms = sensitivity_gate(s.uncertainties(), &StatisticKind::Zms, &cfg).unwrap();
    let verdict = validate(&s, &ence, &cfg).verdict;
    let pass = g_ence.over_sensitive && !g_zms.over_sensitive && verdict == Verdict::CannotValidate;
    outcome(
        pass,
        format!(
            "ENCE gap {:.4} = {:.1} combined se (fires), verdict {verdict:?}; ZMS gap {:.1} combined se (quiet)",
            g_ence.difference,
            g_ence.difference.abs() / g_ence.combined_standard_error,
            g_zms.difference.abs() / g_zms.combined_standard_error
        ),
    )
}

fn extrapolation() -> Outcome {
    let trials = 50;
    let settings = ExtrapolationSettings::default();
    let mut calibrated = 0;
    let mut inflated = 0;
    for t in 0..trials {
        let s = nig(6.0, 5000, 80_000 + t);
        let r = extrapolate_to_zero_bins(&s, BinnedStatistic::Zmse, &settings).unwrap();
        calibrated += usize::from(r.consistent);

        let mut sorted = s.uncertainties().to_vec();
        sorted.sort_by(f64::total_cmp);
        let q3 = sorted[3 * sorted.len() / 4];
        let e: Vec<f64> = s
            .errors()
            .iter()
            .zip(s.uncertainties())
            .map(|(e, u)| if *u >= q3 { 2.0 * e } else { *e })
            .collect();
        let bad = PairedSample::new(e, s.uncertainties().to_vec()).unwrap();
        let r = extrapolate_to_zero_bins(&bad, BinnedStatistic::Zmse, &settings).unwrap();
        inflated += usize::from(!r.consistent);
    }
    let (a, b) = (calibrated as f64 / trials as f64, inflated as f64 / trials as f64);
    outcome(
        a >= 0.9 && b >= 0.9,
        format!("calibrated: interval holds 0 in {a:.2}; inflated: excludes 0 in {b:.2} (both ≥ 0.90)"),
    )
}

fn zfit_recovery() -> Outcome {
    let trials = 50;
    let mut hits = 0;
    let mut nus = Vec::new();
    for t in 0..trials {
        let z = sample_unit(GenerativeSpec::t6(), 5000, 90_000 + t);
        let fit = fit_student_z_values(&z).unwrap();
        hits += usize::from((4.5..=8.0).contains(&fit.nu_z));
        nus.push(fit.nu_z);
    }
    nus.sort_by(f64::total_cmp);
    let rate = hits as f64 / trials as f64;
    outcome(
        rate >= 0.9,
        format!(
            "ν_Z in [4.5, 8] for {rate:.2} of trials (≥ 0.90); range {:.2}..{:.2}",
            nus[0],
            nus[nus.len() - 1]
        ),
    )
}

/// Runs the binary and returns its report with the timing block removed.
fn run_cli(args: &[&str], serial: bool) -> Result<String, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_uqcal"));
    cmd.args(args).env_remove("UQCAL_SEED");
    if serial {
        cmd.arg("--serial");
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    if args[0] == "synth" {
        return Ok(text);
    }
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v.as_object_mut().map(|o| o.remove("timing"));
    Ok(serde_json::to_string(&v).unwrap())
}

fn determinism(dir: &Path) -> Outcome {
    let data = dir.join("d.csv");
    let data = data.to_str().unwrap();
    let synth = [
        "synth", "--model", "nig", "--nu", "6", "-M", "1000", "--seed", "7", "--out", data,
    ];
    let status = Command::new(env!("CARGO_BIN_EXE_uqcal")).args(synth).status();
    if !matches!(status, Ok(s) if s.success()) {
        return outcome(false, "could not write the input dataset".into());
    }
    let commands: Vec<Vec<&str>> = vec![
        vec!["synth", "--model", "t6ig", "-M", "500", "--seed", "3"],
        vec!["stats", "--input", data, "--boot", "300", "--seed", "42"],
        vec!["summarize", "--input", data],
        vec![
            "validate",
            "--stat",
            "zms,ence,cc",
            "--input",
            data,
            "--seed",
            "42",
            "--nmc",
            "300",
            "--boot",
            "300",
        ],
        vec![
            "simulate", "--stat", "zmse", "--input", data, "--seed", "42", "--nmc", "300",
        ],
        vec![
            "scan-nu",
            "--stat",
            "ence",
            "--input",
            data,
            "--seed",
            "42",
            "--nmc",
            "200",
            "--nu-grid",
            "3,6,12",
        ],
        vec![
            "scaling",
            "--model",
            "t6ig",
            "--nmc",
            "50",
            "--m-grid",
            "400,800",
            "--n-grid",
            "5,10,20",
            "--nu-grid",
            "6",
            "--seed",
            "42",
        ],
        vec!["extrapolate", "--stat", "ence,zmse", "--input", data, "--n-step", "2"],
    ];
    let mut failures = Vec::new();
    for args in &commands {
        let runs = [run_cli(args, false), run_cli(args, false), run_cli(args, true)];
        match runs {
            [Ok(a), Ok(b), Ok(c)] if a == b && b == c => {}
            [Err(e), ..] | [_, Err(e), _] | [_, _, Err(e)] => failures.push(e),
            _ => failures.push(format!("{} differs between runs", args[0])),
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} subcommands identical over repeat and serial/parallel runs",
                commands.len()
            )
        } else {
            failures.join("; ")
        },
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("NIG scaling slopes", Box::new(nig_scaling)),
        ("T6IG scaling lines", Box::new(t6ig_scaling)),
        ("ZMS reference universality", Box::new(zms_universality)),
        ("zeta arithmetic", Box::new(zeta_arithmetic)),
        ("NIG moment identity", Box::new(nig_moments)),
        ("BCa coverage", Box::new(bca_coverage)),
        ("sensitivity gate", Box::new(sensitivity)),
        ("zero-bin extrapolation", Box::new(extrapolation)),
        ("Student-t z-fit recovery", Box::new(zfit_recovery)),
        ("determinism", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "acceptance {:>2} {:<28} {}  {} [{:.1}s]",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
