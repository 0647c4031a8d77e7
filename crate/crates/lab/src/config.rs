//! Experiment configuration. Each experiment has a committed TOML file under
//! `configs/`, compiled into the binary so default runs need no files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lempert_core::{Domain, OptimizerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    DiscOracle,
    Remark2Bidisc,
    Example4Product,
    CoveringCounterexample,
    Theorem1Truncation,
    MonotonicitySuite,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::DiscOracle,
        ExperimentId::Remark2Bidisc,
        ExperimentId::Example4Product,
        ExperimentId::CoveringCounterexample,
        ExperimentId::Theorem1Truncation,
        ExperimentId::MonotonicitySuite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::DiscOracle => "disc-oracle",
            ExperimentId::Remark2Bidisc => "remark2-bidisc",
            ExperimentId::Example4Product => "example4-product",
            ExperimentId::CoveringCounterexample => "covering-counterexample",
            ExperimentId::Theorem1Truncation => "theorem1-truncation",
            ExperimentId::MonotonicitySuite => "monotonicity-suite",
        }
    }

    fn builtin_toml(self) -> &'static str {
        match self {
            ExperimentId::DiscOracle => include_str!("../configs/disc-oracle.toml"),
            ExperimentId::Remark2Bidisc => include_str!("../configs/remark2-bidisc.toml"),
            ExperimentId::Example4Product => include_str!("../configs/example4-product.toml"),
            ExperimentId::CoveringCounterexample => {
                include_str!("../configs/covering-counterexample.toml")
            }
            ExperimentId::Theorem1Truncation => include_str!("../configs/theorem1-truncation.toml"),
            ExperimentId::MonotonicitySuite => include_str!("../configs/monotonicity-suite.toml"),
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| LabError::UnknownExperiment(s.to_string()))
    }
}

fn default_seed() -> u64 {
    42
}

/// Numerical constants of the pole configuration. Each experiment reads the
/// keys it needs and rejects a config that lacks one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolesSection {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    /// Second coordinate of the evaluation point in the product experiment.
    pub w: Option<f64>,
    /// Parameter of the boundary schedule `1 − (1 − t)/j²`.
    pub t: Option<f64>,
    /// Evaluation point on the real axis.
    pub z: Option<f64>,
    /// Modulus of the first-coordinate poles `B_m`.
    pub radius: Option<f64>,
    pub m_max: Option<usize>,
    pub cases: Option<usize>,
    pub max_poles: Option<usize>,
    pub max_weight: Option<f64>,
    /// Branch range of the brute-force lift oracle.
    pub oracle_branches: Option<i64>,
    /// Length cap of the cheap scan that exercises the stopping rule.
    pub stop_m_max: Option<usize>,
    pub stop_restarts: Option<usize>,
    pub stop_iterations: Option<usize>,
}

macro_rules! required {
    ($($name:ident: $ty:ty),* $(,)?) => {
        impl PolesSection {
            $(
                pub fn $name(&self) -> Result<$ty> {
                    self.$name.ok_or(LabError::MissingKey(concat!("poles.", stringify!($name))))
                }
            )*
        }
    };
}

required!(
    a1: f64, a2: f64, w: f64, t: f64, z: f64, radius: f64, m_max: usize, cases: usize,
    max_poles: usize, max_weight: f64, oracle_branches: i64, stop_m_max: usize,
    stop_restarts: usize, stop_iterations: usize,
);

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Line-delimited JSON rows are written here when set.
    pub path: Option<PathBuf>,
    /// Also print an aligned table of the rows to standard error.
    #[serde(default)]
    pub summary: bool,
    /// Include wall-clock times in the rows. Timed rows are not reproducible.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: ExperimentId,
    /// Seeds every estimator call; overrides `optimizer.seed`.
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub domain: Domain,
    #[serde(default)]
    pub poles: PolesSection,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    /// The committed config of `id`.
    pub fn builtin(id: ExperimentId) -> Self {
        Self::from_toml(id.builtin_toml()).expect("committed configs parse")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Optimizer settings with the experiment seed applied.
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            seed: self.seed,
            ..self.optimizer.clone()
        }
    }
}
