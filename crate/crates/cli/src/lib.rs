//! Command-line driver: configuration, orchestration and reports.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigError, Method, RunConfig, Tolerances};
pub use report::Report;
pub use run::{run, run_and_write, RunError, RunOutput};
