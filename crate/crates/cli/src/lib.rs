//! Experiment harness for `si-maxcut`: configuration, G-set lookup, seeded
//! multi-run orchestration and report emission.

pub mod cli;
pub mod config;
pub mod data;
pub mod experiment;
pub mod report;

pub use config::{Algo, ExperimentConfig, Init};
pub use experiment::{run_experiment, Outcome, RunRecord};
