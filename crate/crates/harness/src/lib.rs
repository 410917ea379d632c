//! Experiment orchestration for BOCS and its baselines: configuration,
//! the optimization loop, metrics, model validation and persisted outputs.

pub mod config;
pub mod error;
pub mod metrics;
pub mod output;
pub mod runner;
pub mod validate;

pub use config::{BenchmarkSpec, ExperimentConfig, OptimizerKind, OptimizerSpec};
pub use error::{HarnessError, Result};
pub use runner::{run_experiment, RunRecord};
