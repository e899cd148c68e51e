//! Experiment harness around `hsc-core`: config files, Monte-Carlo sweeps,
//! CSV reports and the `hsc` command-line tool.

pub mod app;
pub mod config;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::{AlgorithmConfig, AlgorithmKind, ExperimentConfig, ModelConfig, ModelKind};
pub use error::{CliError, CliResult};
pub use experiment::{run_subspace_pipeline, run_sweep, run_trial, Instance, Scores, TrialReport};
