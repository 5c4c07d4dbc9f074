//! Experiment runner behind the `anatomy` binary: JSON configs in, CSV and
//! JSON reports out.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{CommandKind, ExperimentConfig, Target};
pub use experiments::{run, RunError};
pub use output::{Check, Report, Table};
