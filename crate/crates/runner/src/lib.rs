//! Experiment orchestration around the pacing-auction lab: human-editable
//! TOML configs with sweep axes, deterministic runs persisted as CSV traces
//! plus JSON Lines metrics, and the reproduction suites behind the
//! `pacing-dyn reproduce` command.

pub mod config;
pub mod criteria;
pub mod hash;
pub mod run;

pub use config::{
    load_config, parse_config, AnalysisPlan, ConfigError, ExperimentConfig, RunPoint,
};
pub use criteria::{Suite, Verdict};
pub use run::{run, RunRecord, RunnerError};
