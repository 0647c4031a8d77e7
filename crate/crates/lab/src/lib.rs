//! Experiment runner for `lempert-core`: committed experiment configs,
//! result rows with their assertions, and the input parsing behind the
//! `estimate` command.

pub mod config;
pub mod error;
pub mod experiments;
pub mod input;

pub use config::{ExperimentConfig, ExperimentId};
pub use error::{LabError, Result};
pub use experiments::{run_experiment, Report, ResultRow};
