//! Scenario runner for the `sagnac-qn` noise engine: JSON configs in,
//! CSV noise budgets and a JSON summary out.

pub mod config;
pub mod run;

pub use config::{load_config, ConfigError, ConfigFile, ScenarioConfig};
pub use run::{run_scenario, RunError, ScenarioOutput};
