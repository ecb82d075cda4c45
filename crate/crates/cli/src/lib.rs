//! Configuration files, experiment orchestration and report output for the
//! `mapsel` command-line tool.

pub mod comparison;
pub mod config_file;
pub mod experiment;
pub mod report;

pub use config_file::{parse_config, ConfigFileError};
pub use experiment::{run_experiment, ExperimentError, ExperimentReport, ExperimentSpec};
pub use report::{MetricsRow, RunSummary, METRICS_HEADER};

/// Environment variable holding the log filter (`error`, `info`, `debug`, ...).
pub const LOG_ENV: &str = "MAPSEL_LOG";
