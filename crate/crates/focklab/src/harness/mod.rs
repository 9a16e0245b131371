//! Experiment configuration, verification suites, and result persistence.

mod config;
mod report;
mod suites;

pub use config::{ConfigError, ExperimentConfig, OutputConfig, SweepConfig, ThresholdConfig};
pub use report::{
    emit_report, parse_csv_report, parse_json_report, CheckStatus, OutputFormat, ResultRecord,
};
pub use suites::{run_suite, run_suites, SuiteName, SuiteOutcome};
