//! Scenario configuration files.
//!
//! A config is one JSON document. It names a preset, optionally overrides
//! its parameters, and describes the grid, the sweep and the outputs.
//! Transmissivities and losses are given in ppm, angles in radians.
//!
//! ```json
//! {
//!   "preset": "glasgow",
//!   "overrides": { "eta_bs": 0.0, "bs_loss_ppm": 1000 },
//!   "grid": { "f_min_hz": 10, "f_max_hz": 1e5, "points": 600 },
//!   "sweep": { "parameter": "arm_loss_ppm", "values": [0, 15, 25, 50, 100] },
//!   "zeta_rad": 1.5707963267948966,
//!   "output_prefix": "out/fig4",
//!   "references": ["michelson"]
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sagnac_qn::spectra::{laser_level_from_rin, ZetaChoice};
use sagnac_qn::{presets, InterferometerSpec};
use serde::{Deserialize, Serialize};

const PPM: f64 = 1e-6;
/// Largest accepted splitter offset in a sweep.
pub const MAX_SWEEP_ETA: f64 = 0.2;
/// Losses must stay below this multiple of the ITM transmissivity.
pub const MAX_LOSS_OVER_T_ITM: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown preset `{0}` (available: {names})", names = presets::NAMES.join(", "))]
    UnknownPreset(String),
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Parameter varied across the runs of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Round-trip loss of both arms, ppm.
    ArmLossPpm,
    EtaBs,
    /// `T_itm(north) − T_itm(east)`, ppm.
    #[serde(rename = "delta_T_itm_ppm")]
    DeltaTItmPpm,
    LaserNoiseLevel,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [
        Self::ArmLossPpm,
        Self::EtaBs,
        Self::DeltaTItmPpm,
        Self::LaserNoiseLevel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ArmLossPpm => "arm_loss_ppm",
            Self::EtaBs => "eta_bs",
            Self::DeltaTItmPpm => "delta_T_itm_ppm",
            Self::LaserNoiseLevel => "laser_noise_level",
        }
    }

    /// Copy of `base` with the parameter set to `value`.
    pub fn apply(self, base: &InterferometerSpec, value: f64) -> InterferometerSpec {
        match self {
            Self::ArmLossPpm => base.with_symmetric_loss(value * PPM),
            Self::EtaBs => base.with_eta_bs(value),
            Self::DeltaTItmPpm => base.with_itm_imbalance(value * PPM),
            Self::LaserNoiseLevel => base.with_laser_noise(value),
        }
    }

    fn check(self, base: &InterferometerSpec, value: f64) -> Result<(), ConfigError> {
        let t_itm = base.north.t_itm.min(base.east.t_itm) / PPM;
        let ok = value.is_finite()
            && match self {
                Self::ArmLossPpm => value >= 0.0 && value < MAX_LOSS_OVER_T_ITM * t_itm,
                Self::EtaBs => value.abs() < MAX_SWEEP_ETA,
                Self::DeltaTItmPpm => value.abs() < t_itm,
                Self::LaserNoiseLevel => value >= 1.0,
            };
        if ok {
            Ok(())
        } else {
            Err(invalid(
                "sweep.values",
                format!("{value} is out of range for {}", self.name()),
            ))
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid("sweep.parameter", format!("unknown parameter `{s}`")))
    }
}

/// Reference curve written next to the budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Sql,
    Sagnac,
    Michelson,
}

impl Reference {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sql => "sql",
            Self::Sagnac => "sagnac",
            Self::Michelson => "michelson",
        }
    }
}

impl FromStr for Reference {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sql" => Ok(Self::Sql),
            "sagnac" => Ok(Self::Sagnac),
            "michelson" => Ok(Self::Michelson),
            _ => Err(invalid("references", format!("unknown reference `{s}`"))),
        }
    }
}

/// Parameter overrides applied on top of the preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub p_in_w: Option<f64>,
    pub wavelength_m: Option<f64>,
    pub eta_bs: Option<f64>,
    pub bs_loss_ppm: Option<f64>,
    pub round_trip_m: Option<f64>,
    pub t_itm_ppm: Option<f64>,
    pub arm_loss_ppm: Option<f64>,
    pub delta_t_itm_ppm: Option<f64>,
    pub detuning_rad_s: Option<f64>,
    pub m_itm_kg: Option<f64>,
    pub m_etm_kg: Option<f64>,
    pub eta_pd: Option<f64>,
    pub laser_noise_level: Option<f64>,
    /// Relative intensity noise of the input laser, 1/√Hz. Sets the
    /// laser noise level and conflicts with `laser_noise_level`.
    pub rin_asd: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub f_min_hz: Option<f64>,
    pub f_max_hz: Option<f64>,
    pub points: Option<usize>,
    pub log_spaced: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// On-disk form of a scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub grid: GridFile,
    pub sweep: Option<SweepFile>,
    pub zeta_rad: Option<f64>,
    #[serde(default)]
    pub zeta_optimal: bool,
    pub output_prefix: Option<PathBuf>,
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
    pub log_spaced: bool,
}

impl GridSpec {
    pub fn default_for(preset: &str) -> Self {
        let (f_min, f_max) = match preset {
            "et-lf" => (1.0, 1e3),
            _ => (10.0, 1e5),
        };
        Self {
            f_min,
            f_max,
            points: 600,
            log_spaced: true,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.f_min > 0.0 && self.f_min.is_finite()) {
            return Err(invalid("grid.f_min_hz", "must be positive"));
        }
        if !(self.f_max > self.f_min && self.f_max.is_finite()) {
            return Err(invalid("grid.f_max_hz", "must exceed f_min_hz"));
        }
        if self.points < 2 {
            return Err(invalid("grid.points", "need at least 2"));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Vec<f64> {
        if self.log_spaced {
            return sagnac_qn::spectra::log_grid(self.f_min, self.f_max, self.points)
                .expect("grid validated");
        }
        let step = (self.f_max - self.f_min) / (self.points - 1) as f64;
        let mut v: Vec<f64> = (0..self.points)
            .map(|k| self.f_min + step * k as f64)
            .collect();
        v[self.points - 1] = self.f_max;
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub preset: String,
    pub base: InterferometerSpec,
    pub grid: GridSpec,
    pub sweep: Option<Sweep>,
    pub zeta: ZetaChoice,
    pub output_prefix: PathBuf,
    pub references: Vec<Reference>,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    read_config_file(path)?.resolve()
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, "must be positive"))
    }
}

impl Overrides {
    fn apply(&self, spec: &mut InterferometerSpec) -> Result<(), ConfigError> {
        let o = self;
        if let Some(v) = o.p_in_w {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid("overrides.p_in_w", "must be non-negative"));
            }
            spec.p_in = v;
        }
        if let Some(v) = o.wavelength_m {
            spec.wavelength = positive("overrides.wavelength_m", v)?;
        }
        if let Some(v) = o.eta_bs {
            spec.bs.eta = v;
        }
        if let Some(v) = o.bs_loss_ppm {
            spec.bs.epsilon = v * PPM;
        }
        for arm in [&mut spec.north, &mut spec.east] {
            if let Some(v) = o.round_trip_m {
                arm.length = 0.5 * positive("overrides.round_trip_m", v)?;
            }
            if let Some(v) = o.t_itm_ppm {
                arm.t_itm = positive("overrides.t_itm_ppm", v)? * PPM;
            }
            if let Some(v) = o.arm_loss_ppm {
                arm.t_loss = v * PPM;
            }
            if let Some(v) = o.detuning_rad_s {
                arm.detuning = v;
            }
            if let Some(v) = o.m_itm_kg {
                arm.m_itm = positive("overrides.m_itm_kg", v)?;
            }
            if let Some(v) = o.m_etm_kg {
                arm.m_etm = positive("overrides.m_etm_kg", v)?;
            }
        }
        if let Some(v) = o.delta_t_itm_ppm {
            if v.abs() >= spec.north.t_itm.min(spec.east.t_itm) / PPM {
                return Err(invalid("overrides.delta_t_itm_ppm", "must be smaller than T_itm"));
            }
            *spec = spec.with_itm_imbalance(v * PPM);
        }
        if let Some(v) = o.eta_pd {
            spec.readout.eta_pd = v;
        }
        match (o.laser_noise_level, o.rin_asd) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "overrides.rin_asd",
                    "conflicts with laser_noise_level",
                ))
            }
            (Some(v), None) => *spec = spec.with_laser_noise(v),
            (None, Some(rin)) => {
                let level = laser_level_from_rin(rin, spec.p_in, spec.wavelength)
                    .map_err(|e| invalid("overrides.rin_asd", e.to_string()))?;
                *spec = spec.with_laser_noise(level);
            }
            (None, None) => {}
        }
        Ok(())
    }
}

impl ConfigFile {
    pub fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        let preset = self.preset.clone().unwrap_or_else(|| "glasgow".to_string());
        let mut base =
            presets::by_name(&preset).ok_or_else(|| ConfigError::UnknownPreset(preset.clone()))?;
        self.overrides.apply(&mut base)?;
        base.validate().map_err(|e| match e {
            sagnac_qn::Error::InvalidParameter { name, reason } => invalid(name, reason),
            other => invalid("overrides", other.to_string()),
        })?;

        let d = GridSpec::default_for(&preset);
        let grid = GridSpec {
            f_min: self.grid.f_min_hz.unwrap_or(d.f_min),
            f_max: self.grid.f_max_hz.unwrap_or(d.f_max),
            points: self.grid.points.unwrap_or(d.points),
            log_spaced: self.grid.log_spaced.unwrap_or(true),
        };
        grid.validate()?;

        let sweep = match &self.sweep {
            None => None,
            Some(s) => {
                let parameter: SweepParameter = s.parameter.parse()?;
                if s.values.is_empty() {
                    return Err(invalid("sweep.values", "must not be empty"));
                }
                for &v in &s.values {
                    parameter.check(&base, v)?;
                }
                Some(Sweep {
                    parameter,
                    values: s.values.clone(),
                })
            }
        };

        let zeta = match (self.zeta_rad, self.zeta_optimal) {
            (Some(_), true) => {
                return Err(invalid("zeta_rad", "conflicts with zeta_optimal"));
            }
            (_, true) => ZetaChoice::Optimal,
            (Some(z), false) => {
                if !(z > 0.0 && z < std::f64::consts::PI) {
                    return Err(invalid("zeta_rad", "must lie in (0, pi)"));
                }
                base.readout.zeta = z;
                ZetaChoice::Fixed(z)
            }
            (None, false) => ZetaChoice::Fixed(base.readout.zeta),
        };

        let mut references = self
            .references
            .iter()
            .map(|r| r.parse())
            .collect::<Result<Vec<Reference>, _>>()?;
        references.sort();
        references.dedup();

        Ok(ScenarioConfig {
            output_prefix: self
                .output_prefix
                .clone()
                .unwrap_or_else(|| PathBuf::from(&preset)),
            preset,
            base,
            grid,
            sweep,
            zeta,
            references,
        })
    }
}
