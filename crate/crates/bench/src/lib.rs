//! Benchmark harness: builds a model and a store from a [`RunConfig`], runs
//! the search and renders the outcome.

pub mod config;
pub mod report;
pub mod runner;
pub mod shapes;

pub use config::{ConfigError, ModelSpec, OutputFormat, RunConfig, StorageKind};
pub use report::RunReport;
pub use runner::{execute, ExitCode};
