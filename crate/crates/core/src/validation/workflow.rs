//! ζ-scores under the BS, Sim and Sim2 schemes and the sensitivity-gated
//! validation workflow.

use serde::{Deserialize, Serialize};

use super::zeta::{Scheme, ZetaScore};
use crate::error::{Error, Result};
use crate::generative::GenerativeSpec;
use crate::resampling::{
    bootstrap_ci, derive_stream_seed, simulate_reference_for, BootstrapOptions, Execution, IntervalEstimate, McOptions,
    ReferenceSummary, SimulatedReference,
};
use crate::stats::{beta_gm, PairedSample, StatisticKind};

/// Screening limits on β_GM: squared uncertainties, then squared errors and
/// squared z-scores.
pub const BETA_GM_LIMIT_U2: f64 = 0.6;
pub const BETA_GM_LIMIT_E2: f64 = 0.8;
pub const BETA_GM_LIMIT_Z2: f64 = 0.8;

const BOOTSTRAP_STREAM: u64 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub bootstrap_replicates: usize,
    pub level: f64,
    pub n_mc: usize,
    pub seed: u64,
    /// Generative distribution known from how the data were produced.
    pub declared: Option<GenerativeSpec>,
    /// The two shapes compared by the sensitivity gate.
    pub candidates: (GenerativeSpec, GenerativeSpec),
    /// Gate multiplier on the combined standard error.
    pub sensitivity_k: f64,
    /// Also compute the simulation schemes for statistics with a predefined
    /// reference (reported, not used for the verdict).
    pub all_schemes: bool,
    pub execution: Execution,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            bootstrap_replicates: 1000,
            level: 0.95,
            n_mc: 10_000,
            seed: 0,
            declared: None,
            candidates: (GenerativeSpec::Normal, GenerativeSpec::t6()),
            sensitivity_k: 3.0,
            all_schemes: false,
            execution: Execution::Parallel,
        }
    }
}

impl ValidationConfig {
    pub fn bootstrap_options(&self) -> BootstrapOptions {
        BootstrapOptions::new(
            self.bootstrap_replicates,
            derive_stream_seed(self.seed, BOOTSTRAP_STREAM),
        )
        .with_level(self.level)
        .with_execution(self.execution)
    }

    /// Monte-Carlo settings for `d`; each distribution gets its own stream.
    pub fn mc_options(&self, d: GenerativeSpec) -> McOptions {
        let stream = match d {
            GenerativeSpec::Normal => 1,
            GenerativeSpec::ScaledStudentT { nu } => nu.to_bits(),
        };
        McOptions::new(self.n_mc, derive_stream_seed(self.seed, stream))
            .with_level(self.level)
            .with_execution(self.execution)
    }
}

fn sim_schemes(d: GenerativeSpec) -> (Scheme, Scheme) {
    match d {
        GenerativeSpec::Normal => (Scheme::SimN, Scheme::Sim2N),
        GenerativeSpec::ScaledStudentT { .. } => (Scheme::SimT, Scheme::Sim2T),
    }
}

/// ζ under the Sim scheme: simulated reference, bootstrap interval.
pub fn sim_score(theta_est: f64, bootstrap: &IntervalEstimate, reference: &SimulatedReference) -> ZetaScore {
    let mut score = ZetaScore::new(
        sim_schemes(reference.generative).0,
        theta_est,
        reference.mean,
        bootstrap.clone(),
    );
    let half = bootstrap.half_width();
    if 2.0 * reference.standard_error >= 0.1 * half {
        score.warnings.push(format!(
            "Monte-Carlo error 2u={:.3e} is not small against the interval half-width {:.3e}; increase N_MC",
            2.0 * reference.standard_error,
            half
        ));
    }
    score
}

/// ζ under the Sim2 scheme: simulated reference, Monte-Carlo quantile
/// interval centered on the reference.
pub fn sim2_score(theta_est: f64, reference: &SimulatedReference) -> ZetaScore {
    ZetaScore::new(
        sim_schemes(reference.generative).1,
        theta_est,
        reference.mean,
        reference.interval.clone(),
    )
}

pub fn zeta_bs(sample: &PairedSample, stat: &StatisticKind, config: &ValidationConfig) -> Result<ZetaScore> {
    let theta_ref = stat
        .predefined_reference(sample)
        .ok_or_else(|| Error::NoPredefinedReference(stat.name().to_string()))?;
    let interval = bootstrap_ci(sample, stat, &config.bootstrap_options())?;
    Ok(ZetaScore::new(Scheme::Bs, interval.point, theta_ref, interval))
}

pub fn zeta_sim(
    sample: &PairedSample,
    stat: &StatisticKind,
    d: GenerativeSpec,
    config: &ValidationConfig,
) -> Result<ZetaScore> {
    let interval = bootstrap_ci(sample, stat, &config.bootstrap_options())?;
    let reference = simulate_reference_for(sample, stat, d, &config.mc_options(d))?;
    Ok(sim_score(interval.point, &interval, &reference))
}

pub fn zeta_sim2(
    sample: &PairedSample,
    stat: &StatisticKind,
    d: GenerativeSpec,
    config: &ValidationConfig,
) -> Result<ZetaScore> {
    let theta_est = stat.evaluate(sample)?;
    let reference = simulate_reference_for(sample, stat, d, &config.mc_options(d))?;
    Ok(sim2_score(theta_est, &reference))
}

/// Outcome of comparing simulated references under two generative shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityGate {
    pub references: Vec<ReferenceSummary>,
    pub difference: f64,
    pub combined_standard_error: f64,
    pub k: f64,
    pub over_sensitive: bool,
}

/// `|a - b| > k * sqrt(se_a² + se_b²)`.
pub fn is_over_sensitive(mean_a: f64, se_a: f64, mean_b: f64, se_b: f64, k: f64) -> bool {
    (mean_a - mean_b).abs() > k * se_a.hypot(se_b)
}

fn gate_from(a: &SimulatedReference, b: &SimulatedReference, k: f64) -> SensitivityGate {
    SensitivityGate {
        references: vec![a.summary(), b.summary()],
        difference: a.mean - b.mean,
        combined_standard_error: a.standard_error.hypot(b.standard_error),
        k,
        over_sensitive: is_over_sensitive(a.mean, a.standard_error, b.mean, b.standard_error, k),
    }
}

pub fn sensitivity_gate(
    uncertainties: &[f64],
    stat: &StatisticKind,
    config: &ValidationConfig,
) -> Result<SensitivityGate> {
    let template = PairedSample::new(uncertainties.to_vec(), uncertainties.to_vec())?;
    sensitivity_gate_for(&template, stat, config)
}

/// Sensitivity gate on the uncertainties (and features) of `sample`.
pub fn sensitivity_gate_for(
    sample: &PairedSample,
    stat: &StatisticKind,
    config: &ValidationConfig,
) -> Result<SensitivityGate> {
    let (a, b) = candidate_references(sample, stat, config)?;
    Ok(gate_from(&a, &b, config.sensitivity_k))
}

fn candidate_references(
    sample: &PairedSample,
    stat: &StatisticKind,
    config: &ValidationConfig,
) -> Result<(SimulatedReference, SimulatedReference)> {
    let (da, db) = config.candidates;
    Ok((
        simulate_reference_for(sample, stat, da, &config.mc_options(da))?,
        simulate_reference_for(sample, stat, db, &config.mc_options(db))?,
    ))
}

/// β_GM of u², E² and Z² with the screening flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screening {
    pub beta_gm_u2: Option<f64>,
    pub beta_gm_e2: Option<f64>,
    pub beta_gm_z2: Option<f64>,
    pub flag_u2: bool,
    pub flag_e2: bool,
    pub flag_z2: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn fitness_screening(sample: &PairedSample) -> Screening {
    let u2: Vec<f64> = sample.uncertainties().iter().map(|u| u * u).collect();
    let e2: Vec<f64> = sample.errors().iter().map(|e| e * e).collect();
    let z2: Vec<f64> = e2.iter().zip(&u2).map(|(e, u)| e / u).collect();
    let mut warnings = Vec::new();
    let mut check = |label: &str, values: &[f64], limit: f64| -> (Option<f64>, bool) {
        match beta_gm(values) {
            Ok(b) => {
                let flag = b > limit;
                if flag {
                    warnings.push(format!(
                        "beta_GM({label}) = {b:.3} exceeds {limit}: heavy-tailed data, statistics may be unreliable"
                    ));
                }
                (Some(b), flag)
            }
            Err(e) => {
                warnings.push(format!("beta_GM({label}) unavailable: {e}"));
                (None, false)
            }
        }
    };
    let (beta_gm_u2, flag_u2) = check("u^2", &u2, BETA_GM_LIMIT_U2);
    let (beta_gm_e2, flag_e2) = check("E^2", &e2, BETA_GM_LIMIT_E2);
    let (beta_gm_z2, flag_z2) = check("Z^2", &z2, BETA_GM_LIMIT_Z2);
    for w in &warnings {
        log::warn!("{w}");
    }
    Screening {
        beta_gm_u2,
        beta_gm_e2,
        beta_gm_z2,
        flag_u2,
        flag_e2,
        flag_z2,
        warnings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Validated,
    Rejected,
    CannotValidate,
    Indeterminate,
}

/// Branch of the workflow that produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    PredefinedReference,
    DeclaredDistribution,
    SensitivityChecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub statistic: StatisticKind,
    pub theta_est: Option<f64>,
    pub route: Route,
    pub zeta_scores: Vec<ZetaScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity_gate: Option<SensitivityGate>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn verdict_of(score: &ZetaScore) -> Verdict {
    match score.valid {
        Some(true) => Verdict::Validated,
        Some(false) => Verdict::Rejected,
        None => Verdict::Indeterminate,
    }
}

/// Runs the validation flowchart for one statistic.
///
/// Statistics with a predefined reference go through the bootstrap
/// benchmark. Otherwise a declared generative distribution is used directly;
/// without one, references under both candidate shapes are compared first
/// and the statistic cannot be validated if they disagree.
pub fn validate(sample: &PairedSample, stat: &StatisticKind, config: &ValidationConfig) -> ValidationReport {
    let route = if stat.has_predefined_reference() {
        Route::PredefinedReference
    } else if config.declared.is_some() {
        Route::DeclaredDistribution
    } else {
        Route::SensitivityChecked
    };
    let screening = fitness_screening(sample);
    let mut report = ValidationReport {
        statistic: *stat,
        theta_est: None,
        route,
        zeta_scores: Vec::new(),
        sensitivity_gate: None,
        verdict: Verdict::Indeterminate,
        error: None,
        warnings: screening.warnings,
    };
    if let Err(e) = run_route(sample, stat, config, &mut report) {
        report.verdict = Verdict::Indeterminate;
        report.error = Some(e.to_string());
    }
    for score in &report.zeta_scores {
        report.warnings.extend(score.warnings.iter().cloned());
        report.warnings.extend(score.interval.warnings.iter().cloned());
    }
    report
}

fn run_route(
    sample: &PairedSample,
    stat: &StatisticKind,
    config: &ValidationConfig,
    report: &mut ValidationReport,
) -> Result<()> {
    let interval = bootstrap_ci(sample, stat, &config.bootstrap_options())?;
    let theta_est = interval.point;
    report.theta_est = Some(theta_est);

    match report.route {
        Route::PredefinedReference => {
            let theta_ref = stat
                .predefined_reference(sample)
                .ok_or_else(|| Error::NoPredefinedReference(stat.name().to_string()))?;
            let bs = ZetaScore::new(Scheme::Bs, theta_est, theta_ref, interval.clone());
            report.verdict = verdict_of(&bs);
            report.zeta_scores.push(bs);
            if config.all_schemes {
                let (a, b) = candidate_references(sample, stat, config)?;
                for r in [&a, &b] {
                    report.zeta_scores.push(sim_score(theta_est, &interval, r));
                    report.zeta_scores.push(sim2_score(theta_est, r));
                }
            }
        }
        Route::DeclaredDistribution => {
            let d = config.declared.expect("route requires a declared distribution");
            let r = simulate_reference_for(sample, stat, d, &config.mc_options(d))?;
            let sim = sim_score(theta_est, &interval, &r);
            report.verdict = verdict_of(&sim);
            report.zeta_scores.push(sim);
            report.zeta_scores.push(sim2_score(theta_est, &r));
        }
        Route::SensitivityChecked => {
            let (a, b) = candidate_references(sample, stat, config)?;
            let gate = gate_from(&a, &b, config.sensitivity_k);
            let sims = [sim_score(theta_est, &interval, &a), sim_score(theta_est, &interval, &b)];
            report.verdict = if gate.over_sensitive {
                Verdict::CannotValidate
            } else {
                match (sims[0].valid, sims[1].valid) {
                    (Some(true), Some(true)) => Verdict::Validated,
                    (Some(false), Some(false)) => Verdict::Rejected,
                    (Some(_), Some(_)) => Verdict::CannotValidate,
                    _ => Verdict::Indeterminate,
                }
            };
            report.sensitivity_gate = Some(gate);
            let [sa, sb] = sims;
            report.zeta_scores.push(sa);
            report.zeta_scores.push(sim2_score(theta_est, &a));
            report.zeta_scores.push(sb);
            report.zeta_scores.push(sim2_score(theta_est, &b));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generative::{gen_synthetic, SyntheticModel, SyntheticModelSpec};
    use crate::stats::BinningConfig;

    fn quick() -> ValidationConfig {
        ValidationConfig {
            bootstrap_replicates: 300,
            n_mc: 500,
            seed: 5,
            ..ValidationConfig::default()
        }
    }

    fn nig(m: usize, seed: u64) -> PairedSample {
        gen_synthetic(&SyntheticModelSpec::new(SyntheticModel::Nig, 6.0, m).unwrap(), seed)
    }

    #[test]
    fn zeta_bs_on_exact_calibration() {
        let u: Vec<f64> = (1..=60).map(|i| f64::from(i) * 0.05).collect();
        let s = PairedSample::new(u.clone(), u).unwrap();
        let z = zeta_bs(&s, &StatisticKind::Zms, &quick()).unwrap();
        assert_eq!(z.theta_est, 1.0);
        assert_eq!(z.zeta, Some(0.0));
        assert_eq!(z.valid, Some(true));
    }

    #[test]
    fn zeta_bs_requires_reference() {
        let s = nig(200, 1);
        for stat in [
            StatisticKind::Cc,
            StatisticKind::Ence(BinningConfig::new(5)),
            StatisticKind::Zmse(BinningConfig::new(5)),
        ] {
            assert!(matches!(
                zeta_bs(&s, &stat, &quick()),
                Err(Error::NoPredefinedReference(_))
            ));
        }
    }

    #[test]
    fn nll_numerator_is_half_zms_deviation() {
        let s = nig(300, 2);
        let z = zeta_bs(&s, &StatisticKind::Nll, &quick()).unwrap();
        let zms = crate::stats::zms(&s);
        assert!((z.theta_est - z.theta_ref - 0.5 * (zms - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn zms_sim_close_to_bs() {
        let s = nig(1000, 3);
        let cfg = ValidationConfig { n_mc: 5000, ..quick() };
        let bs = zeta_bs(&s, &StatisticKind::Zms, &cfg).unwrap();
        let sim = zeta_sim(&s, &StatisticKind::Zms, GenerativeSpec::Normal, &cfg).unwrap();
        assert_eq!(bs.interval, sim.interval);
        assert!((bs.zeta.unwrap() - sim.zeta.unwrap()).abs() < 0.1);
        let sim2 = zeta_sim2(&s, &StatisticKind::Zms, GenerativeSpec::Normal, &cfg).unwrap();
        assert_eq!(sim2.scheme, Scheme::Sim2N);
    }

    #[test]
    fn gate_arithmetic() {
        assert!(!is_over_sensitive(0.5, 0.0, 0.5, 0.0, 3.0));
        assert!(is_over_sensitive(0.5, 0.01, 0.6, 0.01, 3.0));
        assert!(!is_over_sensitive(0.5, 0.02, 0.55, 0.02, 3.0));
    }

    #[test]
    fn zms_route_is_benchmark() {
        let s = nig(500, 4);
        let r = validate(&s, &StatisticKind::Zms, &quick());
        assert_eq!(r.route, Route::PredefinedReference);
        assert_eq!(r.zeta_scores.len(), 1);
        assert_eq!(r.zeta_scores[0].scheme, Scheme::Bs);
        assert!(matches!(r.verdict, Verdict::Validated | Verdict::Rejected));
    }

    #[test]
    fn declared_distribution_route() {
        let s = nig(1000, 5);
        let cfg = ValidationConfig {
            declared: Some(GenerativeSpec::Normal),
            ..quick()
        };
        let r = validate(&s, &StatisticKind::Ence(BinningConfig::new(10)), &cfg);
        assert_eq!(r.route, Route::DeclaredDistribution);
        assert_eq!(r.zeta_scores[0].scheme, Scheme::SimN);
        assert!(r.sensitivity_gate.is_none());
    }

    #[test]
    fn failures_become_verdicts() {
        let s = nig(100, 6);
        let binning = BinningConfig::new(50).with_min_bin_size(20);
        let r = validate(&s, &StatisticKind::Ence(binning), &quick());
        assert_eq!(r.verdict, Verdict::Indeterminate);
        assert!(r.error.is_some());
    }

    #[test]
    fn screening_flags_heavy_tails() {
        let s = nig(2000, 7);
        let sc = fitness_screening(&s);
        assert!(sc.beta_gm_u2.is_some() && sc.beta_gm_e2.is_some());
        assert_eq!(sc.flag_u2, sc.beta_gm_u2.unwrap() > BETA_GM_LIMIT_U2);
    }
}
