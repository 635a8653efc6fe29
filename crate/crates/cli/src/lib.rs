//! Experiment runner behind the `proxgrad` binary: configuration,
//! single-run experiments with CSV/manifest/rate-summary output, and the
//! batch QP comparison.

pub mod config;
pub mod experiment;
pub mod table;
pub mod writers;

pub use config::{CliError, ExperimentConfig, Family, ScheduleSpec};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use table::{run_table1, AlgoSummary, BatchSummary};
