//! Experiment runner behind the `fermilearn` binary.
//!
//! [`ExperimentConfig::from_args`] parses and validates a command line;
//! [`execute`] produces the report text and [`run`] writes it out. Every
//! report is deterministic in the seed apart from its `timestamp` field.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Args, ExperimentConfig, Mode};
pub use error::{CliError, ErrorKind};
pub use run::{execute, execute_with, run, RunOutput, FORMAT_VERSION};
