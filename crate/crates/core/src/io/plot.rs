//! Plain-text plot payloads (whitespace-separated columns, `#` header) and a
//! couple of minimal SVG renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::report::Report;
use crate::error::{Error, Result};
use crate::validation::ScalingFit;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |v| v.to_string())
}

/// File-name-safe version of a dataset label.
fn token(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

struct Sink<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Sink<'_> {
    fn put(&mut self, name: &str, contents: String) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }
}

/// Writes one data file per figure-like panel of `report` into `dir`
/// (created if needed) and returns the paths written, in order.
pub fn emit_plot_data(report: &Report, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut sink = Sink {
        dir,
        written: Vec::new(),
    };

    if !report.datasets.is_empty() {
        let mut s = String::from("# set M beta_gm_u2 beta_gm_e2 beta_gm_z2 mu_z sigma_z nu_z b_z\n");
        for d in &report.datasets {
            let z = d.zfit.as_ref();
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {} {} {}",
                token(&d.dataset),
                d.m,
                opt(d.screening.beta_gm_u2),
                opt(d.screening.beta_gm_e2),
                opt(d.screening.beta_gm_z2),
                opt(z.map(|z| z.mu_z)),
                opt(z.map(|z| z.sigma_z)),
                opt(z.map(|z| z.nu_z)),
                opt(z.map(|z| z.b_z)),
            );
        }
        sink.put("summary.dat", s)?;
    }

    if !report.estimates.is_empty() {
        let mut s = String::from("# set statistic value lower upper\n");
        for e in &report.estimates {
            let iv = e.interval.as_ref();
            let _ = writeln!(
                s,
                "{} {} {} {} {}",
                token(&e.dataset),
                e.statistic.name(),
                opt(iv.map(|i| i.point)),
                opt(iv.map(|i| i.lower)),
                opt(iv.map(|i| i.upper)),
            );
        }
        sink.put("estimates.dat", s)?;
    }

    if !report.validations.is_empty() {
        let mut s = String::from("# set statistic scheme theta_est theta_ref lower upper zeta valid\n");
        let mut bars = Vec::new();
        for v in &report.validations {
            for r in &v.reports {
                for z in &r.zeta_scores {
                    let _ = writeln!(
                        s,
                        "{} {} {} {} {} {} {} {} {}",
                        token(&v.dataset),
                        r.statistic.name(),
                        z.scheme.name(),
                        z.theta_est,
                        z.theta_ref,
                        z.interval.lower,
                        z.interval.upper,
                        opt(z.zeta),
                        z.valid.map_or("nan", |b| if b { "1" } else { "0" }),
                    );
                    bars.push((
                        format!("{} {} {}", v.dataset, r.statistic.name(), z.scheme.name()),
                        z.zeta,
                    ));
                }
            }
        }
        sink.put("zeta_scores.dat", s)?;
        sink.put("zeta_scores.svg", zeta_svg(&bars))?;
    }

    if !report.references.is_empty() {
        let mut s = String::from("# set statistic generative theta_est mean standard_error lower upper\n");
        for r in &report.references {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {} {}",
                token(&r.dataset),
                r.statistic.name(),
                r.reference.generative.label(),
                opt(r.theta_est),
                r.reference.mean,
                r.reference.standard_error,
                r.reference.interval.lower,
                r.reference.interval.upper,
            );
        }
        sink.put("references.dat", s)?;
    }

    for scan in &report.nu_scans {
        let mut s = format!("# theta_est {}\n# nu mean standard_error\n", opt(scan.theta_est));
        for p in &scan.points {
            let _ = writeln!(s, "{} {} {}", p.nu, p.mean, p.standard_error);
        }
        let name = format!("nu_scan_{}_{}.dat", token(&scan.dataset), scan.statistic.name());
        sink.put(&name, s)?;
    }

    if let Some(study) = &report.scaling {
        for fit in [&study.ence, &study.zmse] {
            let stem = format!("scaling_{}", fit.statistic.to_lowercase());
            sink.put(&format!("{stem}.dat"), scaling_dat(fit))?;
            sink.put(&format!("{stem}.svg"), scaling_svg(fit))?;
        }
    }

    for entry in &report.extrapolations {
        let x = &entry.extrapolation;
        let mut s = format!(
            "# slope {}\n# intercept {}\n# intercept_lower {}\n# intercept_upper {}\n# ols_intercept_lower {}\n# ols_intercept_upper {}\n# consistent {}\n",
            x.slope,
            x.intercept,
            x.intercept_interval.lower,
            x.intercept_interval.upper,
            x.ols_intercept_interval.lower,
            x.ols_intercept_interval.upper,
            x.consistent
        );
        for line in &x.reference_lines {
            let _ = writeln!(s, "# reference {} {} {}", line.model.name(), line.intercept, line.slope);
        }
        s.push_str("# n x value used_in_fit\n");
        for p in &x.points {
            let _ = writeln!(s, "{} {} {} {}", p.n, p.x, p.value, u8::from(p.used_in_fit));
        }
        let name = format!("extrapolation_{}_{}.dat", token(&entry.dataset), x.statistic.name());
        sink.put(&name, s)?;
    }

    Ok(sink.written)
}

fn scaling_dat(fit: &ScalingFit) -> String {
    let mut s = format!(
        "# model {}\n# slope {}\n# slope_se {}\n# intercept {}\n# through_origin {}\n# m_exponent {}\n",
        fit.model.name(),
        fit.slope,
        fit.slope_se,
        fit.intercept,
        fit.fit_through_origin,
        opt(fit.m_exponent),
    );
    s.push_str("# M N nu x mean standard_error fitted\n");
    for p in &fit.points {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {}",
            p.m,
            p.n,
            p.nu,
            p.x,
            p.mean,
            p.standard_error,
            fit.intercept + fit.slope * p.x
        );
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
        W / 2.0
    )
}

/// Horizontal ζ bars with the |ζ| = 1 band marked.
fn zeta_svg(bars: &[(String, Option<f64>)]) -> String {
    let row = 18.0;
    let height = PAD + row * bars.len() as f64 + 20.0;
    let limit = bars
        .iter()
        .filter_map(|b| b.1)
        .fold(2.0f64, |m, z| m.max(z.abs()))
        .min(50.0);
    let x0 = 260.0;
    let half = (W - x0 - 20.0) / 2.0;
    let cx = x0 + half;
    let sx = |z: f64| cx + z.clamp(-limit, limit) / limit * half;
    let mut s = svg_open("zeta-scores").replace(&format!("height=\"{H}\""), &format!("height=\"{height}\""));
    let _ = writeln!(
        s,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#e6f2e6\"/>",
        sx(-1.0),
        PAD - 5.0,
        sx(1.0) - sx(-1.0),
        row * bars.len() as f64 + 5.0
    );
    for (i, (label, z)) in bars.iter().enumerate() {
        let y = PAD + row * i as f64;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            y + 11.0,
            escape(label)
        );
        match z {
            Some(z) => {
                let (a, b) = if *z < 0.0 { (sx(*z), cx) } else { (cx, sx(*z)) };
                let color = if z.abs() <= 1.0 { "#3a7d44" } else { "#b23a48" };
                let _ = writeln!(
                    s,
                    "<rect x=\"{a}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>",
                    y + 2.0,
                    (b - a).max(0.5),
                    row - 4.0
                );
            }
            None => {
                let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">indeterminate</text>", cx + 4.0, y + 11.0);
            }
        }
    }
    let _ = writeln!(
        s,
        "<line x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"black\"/>\n</svg>",
        PAD - 5.0,
        height - 20.0
    );
    s
}

/// Mean values with ±2 se bars against (N/M)^{1/2} and the fitted line.
fn scaling_svg(fit: &ScalingFit) -> String {
    let xmax = fit.points.iter().map(|p| p.x).fold(0.0, f64::max) * 1.05;
    let ymax = fit
        .points
        .iter()
        .map(|p| p.mean + 2.0 * p.standard_error)
        .fold(fit.intercept.max(0.0), f64::max)
        * 1.05;
    let sx = |x: f64| PAD + x / xmax * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / ymax * (H - 2.0 * PAD);
    let mut s = svg_open(&format!(
        "{} {}: {:.4} + {:.4} (N/M)^1/2",
        fit.model.name(),
        fit.statistic,
        fit.intercept,
        fit.slope
    ));
    let _ = writeln!(
        s,
        "<line x1=\"{PAD}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n\
         <line x1=\"{PAD}\" y1=\"{0}\" x2=\"{PAD}\" y2=\"{PAD}\" stroke=\"black\"/>",
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b23a48\"/>",
        sx(0.0),
        sy(fit.intercept),
        sx(xmax),
        sy(fit.intercept + fit.slope * xmax)
    );
    for p in &fit.points {
        let (x, y) = (sx(p.x), sy(p.mean));
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#555\"/><circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"#1f4e79\"/>",
            sy(p.mean - 2.0 * p.standard_error),
            sy(p.mean + 2.0 * p.standard_error)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">(N/M)^1/2</text>\n</svg>",
        W / 2.0,
        H - 15.0
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generative::SyntheticModel;
    use crate::io::{DatasetValidation, RunConfig};
    use crate::resampling::{IntervalEstimate, IntervalMethod};
    use crate::stats::StatisticKind;
    use crate::validation::{
        fit_points, Route, ScalingDesign, ScalingPoint, ScalingStudy, Scheme, ValidationReport, Verdict, ZetaScore,
    };

    fn report() -> Report {
        let mut r = Report::new("validate", RunConfig::default());
        let iv = IntervalEstimate::from_bounds(0.96, 0.87, 1.12, IntervalMethod::Bca);
        let scores = vec![
            ZetaScore::new(Scheme::Bs, 0.96, 1.0, iv.clone()),
            ZetaScore::new(Scheme::SimN, 0.96, 1.01, iv),
        ];
        for set in ["set 1", "set 2"] {
            r.validations.push(DatasetValidation {
                dataset: set.into(),
                reports: vec![ValidationReport {
                    statistic: StatisticKind::Zms,
                    theta_est: Some(0.96),
                    route: Route::PredefinedReference,
                    zeta_scores: scores.clone(),
                    sensitivity_gate: None,
                    verdict: Verdict::Validated,
                    error: None,
                    warnings: Vec::new(),
                }],
            });
        }
        let points: Vec<ScalingPoint> = [(2000, 10), (2000, 40), (8000, 10), (8000, 40)]
            .iter()
            .map(|&(m, n)| {
                let x = (n as f64 / m as f64).sqrt();
                ScalingPoint {
                    m,
                    n,
                    nu: 6.0,
                    x,
                    mean: 0.56 * x,
                    standard_error: 0.001,
                }
            })
            .collect();
        let fit = fit_points("ENCE", SyntheticModel::Nig, points, true, 0.95).unwrap();
        r.scaling = Some(ScalingStudy {
            model: SyntheticModel::Nig,
            n_mc: 10,
            seed: 0,
            design: ScalingDesign::reduced(),
            ence: fit.clone(),
            zmse: ScalingFit {
                statistic: "ZMSE".into(),
                ..fit
            },
        });
        r
    }

    #[test]
    fn zeta_rows_per_set_and_scheme() {
        let dir = tempfile::tempdir().unwrap();
        emit_plot_data(&report(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("zeta_scores.dat")).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("set_1 ZMS BS 0.96 1 0.87 1.12"));
        assert!(dir.path().join("zeta_scores.svg").exists());
    }

    #[test]
    fn scaling_file_has_coefficients() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plot_data(&report(), dir.path()).unwrap();
        assert!(files.iter().any(|f| f.ends_with("scaling_ence.svg")));
        let text = fs::read_to_string(dir.path().join("scaling_ence.dat")).unwrap();
        let slope: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("# slope "))
            .unwrap()
            .parse()
            .unwrap();
        assert!((slope - 0.56).abs() < 1e-12);
        assert!(text.contains("# intercept 0\n"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
    }
}
