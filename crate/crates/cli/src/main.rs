use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sagnac_qn_cli::config::{read_config_file, ConfigError, ConfigFile, GridFile, SweepFile};
use sagnac_qn_cli::{run_scenario, RunError};

/// Quantum-noise budgets for a Sagnac speed meter with ring arm cavities.
///
/// Writes one CSV budget per sweep value, an optional reference CSV and a
/// JSON summary with low-frequency slope fits.
#[derive(Debug, Parser)]
#[command(name = "sagnac-qn", version)]
struct Cli {
    /// JSON scenario file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in parameter set: glasgow or et-lf.
    #[arg(long)]
    preset: Option<String>,
    /// Sweep, e.g. `arm_loss_ppm=0,15,25,50,100`.
    #[arg(long, value_name = "NAME=V1,V2,...")]
    sweep: Option<String>,
    /// Lowest frequency in Hz.
    #[arg(long)]
    fmin: Option<f64>,
    /// Highest frequency in Hz.
    #[arg(long)]
    fmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Homodyne angle in radians.
    #[arg(long, value_name = "RAD", conflicts_with = "zeta_opt")]
    zeta: Option<f64>,
    /// Optimise the homodyne angle at every frequency.
    #[arg(long)]
    zeta_opt: bool,
    /// Output path prefix.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// Reference curves: any of sql, sagnac, michelson.
    #[arg(long, value_delimiter = ',')]
    references: Option<Vec<String>>,
    /// Input-laser relative intensity noise in 1/rtHz.
    #[arg(long, value_name = "RIN")]
    rin_asd: Option<f64>,
}

fn parse_sweep(s: &str) -> Result<SweepFile, ConfigError> {
    let bad = |reason: &str| ConfigError::Invalid {
        field: "--sweep".to_string(),
        reason: reason.to_string(),
    };
    let (name, list) = s.split_once('=').ok_or_else(|| bad("expected NAME=V1,V2,..."))?;
    let values = list
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad("values must be numbers")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepFile {
        parameter: name.trim().to_string(),
        values,
    })
}

fn build(cli: &Cli) -> Result<ConfigFile, ConfigError> {
    let mut file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => ConfigFile::default(),
    };
    if cli.preset.is_some() {
        file.preset.clone_from(&cli.preset);
    }
    if let Some(s) = &cli.sweep {
        file.sweep = Some(parse_sweep(s)?);
    }
    let g = &mut file.grid;
    *g = GridFile {
        f_min_hz: cli.fmin.or(g.f_min_hz),
        f_max_hz: cli.fmax.or(g.f_max_hz),
        points: cli.points.or(g.points),
        log_spaced: g.log_spaced,
    };
    if let Some(z) = cli.zeta {
        file.zeta_rad = Some(z);
        file.zeta_optimal = false;
    }
    if cli.zeta_opt {
        file.zeta_rad = None;
        file.zeta_optimal = true;
    }
    if let Some(out) = &cli.out {
        file.output_prefix = Some(out.clone());
    }
    if let Some(r) = &cli.references {
        file.references.clone_from(r);
    }
    if let Some(rin) = cli.rin_asd {
        file.overrides.rin_asd = Some(rin);
        file.overrides.laser_noise_level = None;
    }
    Ok(file)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build(&cli).and_then(|f| f.resolve()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_scenario(&config) {
        Ok(out) => {
            for r in &out.runs {
                println!("{}", r.csv.display());
            }
            if let Some(p) = &out.references {
                println!("{}", p.display());
            }
            println!("{}", out.summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RunError::Numerical { .. } | RunError::Reference { .. } => ExitCode::from(3),
                RunError::Io { .. } => ExitCode::FAILURE,
            }
        }
    }
}
