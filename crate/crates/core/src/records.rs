//! Flat serializable forms of estimates and competitors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discs::Competitor;
use crate::domains::ContainmentCertificate;
use crate::lempert::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRecord {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<ComplexRecord> for Complex64 {
    fn from(c: ComplexRecord) -> Self {
        Complex64::new(c.re, c.im)
    }
}

fn records(values: &[Complex64]) -> Vec<ComplexRecord> {
    values.iter().copied().map(ComplexRecord::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub lambda: ComplexRecord,
    pub pole_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitorRecord {
    pub representation: String,
    /// Ascending coefficients of each polynomial in the representation.
    pub coefficients: Vec<Vec<ComplexRecord>>,
    pub base_point: Vec<ComplexRecord>,
    pub nodes: Vec<NodeRecord>,
    pub certificate: ContainmentCertificate,
}

impl From<&Competitor> for CompetitorRecord {
    fn from(c: &Competitor) -> Self {
        let representation = c.disc.representation();
        Self {
            representation: representation.name().to_string(),
            coefficients: representation
                .polynomials()
                .iter()
                .map(|p| records(p.coeffs()))
                .collect(),
            base_point: records(&c.base_point),
            nodes: c
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| NodeRecord {
                    lambda: n.lambda.into(),
                    pole_index: n.pole_index,
                    branch: c.branches.as_ref().map(|b| b[i]),
                })
                .collect(),
            certificate: c.certificate,
        }
    }
}

/// An [`Estimate`] as one flat record. The wall-clock time is only included
/// on request, so records of seeded runs are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub certified: bool,
    pub restarts_used: usize,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    pub competitor: Option<CompetitorRecord>,
}

impl EstimateRecord {
    pub fn new(estimate: &Estimate, with_timing: bool) -> Self {
        Self {
            value: estimate.value,
            certified: estimate.certified,
            restarts_used: estimate.restarts_used,
            iterations: estimate.iterations,
            seed: estimate.seed,
            runtime_ms: with_timing.then_some(estimate.runtime_ms),
            competitor: estimate.competitor.as_ref().map(CompetitorRecord::from),
        }
    }
}
