//! Scenario execution and file output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sagnac_qn::spectra::{
    ideal_reference, low_frequency_slope, noise_budget, BudgetError, IdealReference, NoiseBudget,
    Port, ZetaChoice,
};
use serde::Serialize;

use crate::config::{Reference, ScenarioConfig, SweepParameter};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        source: BudgetError,
    },
    #[error("reference curve `{name}`: {source}")]
    Reference {
        name: &'static str,
        source: sagnac_qn::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// One evaluated sweep value.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub value: Option<f64>,
    pub budget: NoiseBudget,
    pub csv: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub runs: Vec<RunOutput>,
    pub references: Option<PathBuf>,
    pub summary: PathBuf,
}

pub fn csv_header() -> String {
    let mut h = String::from("frequency_hz,total_asd_m_rthz,sql_asd_m_rthz");
    for p in Port::ALL {
        h.push(',');
        h.push_str(p.name());
        h.push_str("_psd_m2hz");
    }
    h
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn budget_path(prefix: &Path, sweep: Option<(SweepParameter, f64)>) -> PathBuf {
    match sweep {
        None => with_suffix(prefix, ".csv"),
        Some((p, v)) => with_suffix(prefix, &format!("_{}_{v}.csv", p.name())),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| RunError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(io)?;
    w.flush().map_err(io)
}

pub fn budget_csv(b: &NoiseBudget) -> String {
    let mut out = csv_header();
    out.push('\n');
    for i in 0..b.frequencies.len() {
        let mut row = vec![num(b.frequencies[i]), num(b.asd[i]), num(b.sql_asd[i])];
        row.extend(Port::ALL.iter().map(|p| num(b.per_port[p][i])));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn reference_psd(r: &IdealReference, which: Reference, omega: f64, zeta: ZetaChoice) -> sagnac_qn::Result<f64> {
    let z = match zeta {
        ZetaChoice::Fixed(z) => z,
        ZetaChoice::Optimal => {
            let k = match which {
                Reference::Sagnac => sagnac_qn::spectra::k_sagnac(r.theta, r.gamma, omega),
                _ => sagnac_qn::spectra::k_michelson(r.theta_total, r.gamma, omega),
            };
            (1.0 / k).atan()
        }
    };
    match which {
        Reference::Sql => r.sql(omega),
        Reference::Sagnac => r.sagnac(omega, z),
        Reference::Michelson => r.michelson(omega, z),
    }
}

/// Reference ASD curves, one column per entry of `refs`.
pub fn reference_curves(
    config: &ScenarioConfig,
    freqs: &[f64],
) -> Result<Vec<(Reference, Vec<f64>)>, RunError> {
    let r = ideal_reference(&config.base).map_err(|source| RunError::Reference {
        name: "ideal",
        source,
    })?;
    config
        .references
        .iter()
        .map(|&which| {
            let asd = freqs
                .iter()
                .map(|&f| reference_psd(&r, which, TWO_PI * f, config.zeta).map(f64::sqrt))
                .collect::<sagnac_qn::Result<Vec<f64>>>()
                .map_err(|source| RunError::Reference {
                    name: which.name(),
                    source,
                })?;
            Ok((which, asd))
        })
        .collect()
}

#[derive(Serialize)]
struct Summary<'a> {
    preset: &'a str,
    zeta_rad: Option<f64>,
    zeta_optimal: bool,
    f_min_hz: f64,
    f_max_hz: f64,
    points: usize,
    log_spaced: bool,
    sweep_parameter: Option<&'static str>,
    runs: Vec<RunSummary>,
    references: Vec<ReferenceSummary>,
}

#[derive(Serialize)]
struct RunSummary {
    value: Option<f64>,
    csv: String,
    low_frequency_slope: Option<f64>,
    asd_at_f_min_m_rthz: f64,
}

#[derive(Serialize)]
struct ReferenceSummary {
    name: &'static str,
    low_frequency_slope: Option<f64>,
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Runs every sweep value and writes budgets, references and summary.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let freqs = config.grid.frequencies();
    let cases: Vec<Option<f64>> = match &config.sweep {
        None => vec![None],
        Some(s) => s.values.iter().copied().map(Some).collect(),
    };
    let mut runs = Vec::with_capacity(cases.len());
    for value in cases {
        let (spec, tag) = match (&config.sweep, value) {
            (Some(s), Some(v)) => (s.parameter.apply(&config.base, v), Some((s.parameter, v))),
            _ => (config.base, None),
        };
        let budget = noise_budget(&spec, &freqs, config.zeta).map_err(|source| {
            RunError::Numerical {
                context: match tag {
                    Some((p, v)) => format!("{} = {v}", p.name()),
                    None => "base configuration".to_string(),
                },
                source,
            }
        })?;
        let csv = budget_path(&config.output_prefix, tag);
        write_text(&csv, &budget_csv(&budget))?;
        runs.push(RunOutput { value, budget, csv });
    }

    let curves = reference_curves(config, &freqs)?;
    let references = if curves.is_empty() {
        None
    } else {
        let path = with_suffix(&config.output_prefix, "_references.csv");
        let mut text = String::from("frequency_hz");
        for (r, _) in &curves {
            text.push_str(&format!(",{}_asd_m_rthz", r.name()));
        }
        text.push('\n');
        for (i, f) in freqs.iter().enumerate() {
            text.push_str(&num(*f));
            for (_, asd) in &curves {
                text.push(',');
                text.push_str(&num(asd[i]));
            }
            text.push('\n');
        }
        write_text(&path, &text)?;
        Some(path)
    };

    let summary = Summary {
        preset: &config.preset,
        zeta_rad: match config.zeta {
            ZetaChoice::Fixed(z) => Some(z),
            ZetaChoice::Optimal => None,
        },
        zeta_optimal: config.zeta == ZetaChoice::Optimal,
        f_min_hz: config.grid.f_min,
        f_max_hz: config.grid.f_max,
        points: config.grid.points,
        log_spaced: config.grid.log_spaced,
        sweep_parameter: config.sweep.as_ref().map(|s| s.parameter.name()),
        runs: runs
            .iter()
            .map(|r| RunSummary {
                value: r.value,
                csv: file_name(&r.csv),
                low_frequency_slope: low_frequency_slope(&freqs, &r.budget.asd).ok(),
                asd_at_f_min_m_rthz: r.budget.asd[0],
            })
            .collect(),
        references: curves
            .iter()
            .map(|(r, asd)| ReferenceSummary {
                name: r.name(),
                low_frequency_slope: low_frequency_slope(&freqs, asd).ok(),
            })
            .collect(),
    };
    let summary_path = with_suffix(&config.output_prefix, "_summary.json");
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serialises");
    json.push('\n');
    write_text(&summary_path, &json)?;

    Ok(ScenarioOutput {
        runs,
        references,
        summary: summary_path,
    })
}
