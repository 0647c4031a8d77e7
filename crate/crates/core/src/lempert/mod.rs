//! The weighted objective, the estimator, closed-form values on model
//! domains, truncation scans and monotonicity checks.
//!
//! A pole function is modeled by a [`PoleSpec`]: a finite list of distinct
//! poles with positive weights, optionally backed by a generator for a
//! countable family. Pole functions with larger support are only ever seen
//! through their finite restrictions; their value is the infimum over those.

mod estimator;
mod monotonicity;
mod oracles;
mod scan;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BoundarySchedule;
use crate::discs::Competitor;
use crate::domains::{Domain, DEFAULT_BOUNDARY_SAMPLES, DEFAULT_MARGIN_FLOOR};
use crate::error::{Error, Result};

pub use estimator::{estimate_lempert, estimate_lempert_warm, extend_competitor};
pub use monotonicity::{check_monotonicity, MonotonicityReport};
pub use oracles::{lempert_disc_oracle, lempert_product_oracle, lempert_punctured_oracle, PuncturedOracle};
pub use scan::{finite_truncation_scan, ScanReport, STOP_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub point: Vec<Complex64>,
    pub weight: f64,
}

impl Pole {
    pub fn new(point: Vec<Complex64>, weight: f64) -> Self {
        Self { point, weight }
    }

    /// A pole of the unit disc or punctured disc.
    pub fn scalar(point: Complex64, weight: f64) -> Self {
        Self::new(vec![point], weight)
    }
}

/// Generators of countable pole families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PoleGenerator {
    /// Real poles `1 − (1 − t)/j²` of the unit disc, all with one weight.
    BoundarySchedule { schedule: BoundarySchedule, weight: f64 },
}

impl PoleGenerator {
    pub fn id(&self) -> &'static str {
        match self {
            PoleGenerator::BoundarySchedule { .. } => BoundarySchedule::ID,
        }
    }

    /// The `j`-th pole, `j ≥ 1`. `None` once the family is exhausted.
    pub fn pole(&self, j: usize) -> Option<Pole> {
        match self {
            PoleGenerator::BoundarySchedule { schedule, weight } => {
                let x = schedule.point(j);
                (x < 1.0).then(|| Pole::scalar(Complex64::new(x, 0.0), *weight))
            }
        }
    }

    /// Bound on `Σ_j (1 − |a_j|)` witnessing the Blaschke condition.
    pub fn blaschke_bound(&self) -> f64 {
        match self {
            PoleGenerator::BoundarySchedule { schedule, .. } => schedule.blaschke_bound(),
        }
    }
}

/// A pole function with finite (or finitely truncated) support.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleSpec {
    poles: Vec<Pole>,
    generator: Option<PoleGenerator>,
}

impl PoleSpec {
    pub fn finite(poles: Vec<Pole>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::EmptyPoleSet);
        }
        let dim = poles[0].point.len();
        for (i, p) in poles.iter().enumerate() {
            if p.point.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.point.len(),
                });
            }
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(Error::InvalidWeight(p.weight));
            }
            if p.point.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument(format!("pole {i} is not finite")));
            }
            for (j, q) in poles.iter().enumerate().take(i) {
                if p.point == q.point {
                    return Err(Error::RepeatedNodes(format!("poles {j} and {i} coincide")));
                }
            }
        }
        Ok(Self {
            poles,
            generator: None,
        })
    }

    /// The first `count` poles of a countable family; the generator is kept
    /// so the family can be extended.
    pub fn countable(generator: PoleGenerator, count: usize) -> Result<Self> {
        let mut poles = Vec::with_capacity(count);
        let mut tail = 0.0;
        for j in 1..=count {
            let pole = generator
                .pole(j)
                .ok_or_else(|| Error::InvalidArgument(format!("generator exhausted at j = {j}")))?;
            tail += 1.0 - pole.point[0].norm();
            if tail > generator.blaschke_bound() * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument("Blaschke witness violated".into()));
            }
            poles.push(pole);
        }
        let mut spec = Self::finite(poles)?;
        spec.generator = Some(generator);
        Ok(spec)
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn generator(&self) -> Option<&PoleGenerator> {
        self.generator.as_ref()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.poles[0].point.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p.weight).collect()
    }

    pub fn points(&self) -> Vec<Vec<Complex64>> {
        self.poles.iter().map(|p| p.point.clone()).collect()
    }

    /// The restriction `p_B` to the poles at `subset`, in that order.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptyPoleSet);
        }
        let poles = subset
            .iter()
            .map(|&i| {
                self.poles
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("no pole with index {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::finite(poles)
    }

    /// The truncation `A_m = (a_j)_{j ≤ m}`.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        self.restrict(&(0..m.min(self.len())).collect::<Vec<_>>())
    }

    /// Checks that every pole lies in `domain` and differs from `z`.
    pub fn validate_in(&self, domain: &Domain, z: &[Complex64]) -> Result<()> {
        if !domain.contains(z)? {
            return Err(Error::OutsideDomain);
        }
        for (i, p) in self.poles.iter().enumerate() {
            if !domain.contains(&p.point)? {
                return Err(Error::InvalidArgument(format!(
                    "pole {i} lies outside the domain"
                )));
            }
            if p.point == z {
                return Err(Error::InvalidArgument(format!(
                    "pole {i} coincides with the evaluation point"
                )));
            }
        }
        Ok(())
    }
}

/// Search and certification settings for [`estimate_lempert`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub seed: u64,
    /// Random restarts per branch assignment.
    pub restarts: usize,
    /// Simplex iterations per restart.
    pub max_iterations: usize,
    /// Free coefficients of `Q` per coordinate in the final polynomial disc.
    pub free_coefficients: usize,
    /// Cap on free coefficients when the fit is refined by doubling.
    pub max_free_coefficients: usize,
    /// Circle samples of the minimax fit of `Q`.
    pub fit_samples: usize,
    /// Lawson sweeps per minimax fit.
    pub lawson_sweeps: usize,
    /// Circle samples used by the final certification.
    pub boundary_samples: usize,
    pub margin_floor: f64,
    /// Radius `s` of the final `λ ↦ φ(sλ)` composition.
    pub shrink: f64,
    /// Branch integers of pole lifts range over `|k| ≤ branch_bound`.
    pub branch_bound: i64,
    /// Branch assignments searched, best lower bounds first.
    pub branch_keep: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            restarts: 32,
            max_iterations: 2000,
            free_coefficients: 8,
            max_free_coefficients: 128,
            fit_samples: 512,
            lawson_sweeps: 300,
            boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
            margin_floor: DEFAULT_MARGIN_FLOOR,
            shrink: 1.0 - 1e-6,
            branch_bound: 5,
            branch_keep: 3,
        }
    }
}

/// A certified upper bound on `l_D(p, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub competitor: Option<Competitor>,
    pub certified: bool,
    pub restarts_used: usize,
    pub iterations: usize,
    pub seed: u64,
    pub runtime_ms: u64,
}

impl Estimate {
    /// The fallback when no competitor could be certified: the trivial upper
    /// bound `1`.
    pub fn uncertified(restarts_used: usize, iterations: usize, seed: u64, runtime_ms: u64) -> Self {
        Self {
            value: 1.0,
            competitor: None,
            certified: false,
            restarts_used,
            iterations,
            seed,
            runtime_ms,
        }
    }
}

/// `∏_j |λ_j|^{p_j}` over the competitor's nodes.
pub fn objective(competitor: &Competitor, spec: &PoleSpec) -> Result<f64> {
    if competitor.nodes.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            actual: competitor.nodes.len(),
        });
    }
    let mut seen = vec![false; spec.len()];
    let mut value = 1.0;
    for node in &competitor.nodes {
        match seen.get_mut(node.pole_index) {
            Some(s) if !*s => *s = true,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "node pole index {} does not match the pole list",
                    node.pole_index
                )))
            }
        }
        value *= node.lambda.norm().powf(spec.poles[node.pole_index].weight);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discs::{AnalyticDisc, Node};
    use crate::domains::certify_disc_in_domain;
    use crate::poly::Poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity_competitor(nodes: &[Complex64]) -> Competitor {
        let disc = AnalyticDisc::polynomial(vec![Poly::identity()]).unwrap();
        let cert = certify_disc_in_domain(&Domain::UnitDisc, &disc.rescale(0.99)).unwrap();
        Competitor::new(
            disc,
            vec![c(0.0, 0.0)],
            nodes
                .iter()
                .enumerate()
                .map(|(i, &lambda)| Node {
                    lambda,
                    pole_index: i,
                })
                .collect(),
            cert,
        )
        .unwrap()
    }

    #[test]
    fn objective_examples() {
        let one = PoleSpec::finite(vec![Pole::scalar(c(0.5, 0.0), 1.0)]).unwrap();
        assert_eq!(
            objective(&identity_competitor(&[c(0.5, 0.0)]), &one).unwrap(),
            0.5
        );

        let two = PoleSpec::finite(vec![
            Pole::scalar(c(0.5, 0.0), 1.0),
            Pole::scalar(c(0.0, 0.5), 1.0),
        ])
        .unwrap();
        let comp = identity_competitor(&[c(0.5, 0.0), c(0.0, 0.5)]);
        assert_eq!(objective(&comp, &two).unwrap(), 0.25);

        let squared = PoleSpec::finite(vec![Pole::scalar(c(0.5, 0.0), 2.0)]).unwrap();
        assert_eq!(
            objective(&identity_competitor(&[c(0.5, 0.0)]), &squared).unwrap(),
            0.25
        );

        assert!(objective(&comp, &one).is_err());
    }

    #[test]
    fn spec_validation() {
        assert_eq!(PoleSpec::finite(vec![]), Err(Error::EmptyPoleSet));
        assert!(matches!(
            PoleSpec::finite(vec![Pole::scalar(c(0.1, 0.0), -1.0)]),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            PoleSpec::finite(vec![
                Pole::scalar(c(0.1, 0.0), 1.0),
                Pole::scalar(c(0.1, 0.0), 2.0)
            ]),
            Err(Error::RepeatedNodes(_))
        ));
        let spec = PoleSpec::finite(vec![Pole::scalar(c(0.25, 0.0), 1.0)]).unwrap();
        assert!(spec.validate_in(&Domain::PuncturedDisc, &[c(0.25, 0.0)]).is_err());
        assert!(spec.validate_in(&Domain::PuncturedDisc, &[c(0.0, 0.0)]).is_err());
        assert!(spec.validate_in(&Domain::PuncturedDisc, &[c(0.5, 0.0)]).is_ok());
    }

    #[test]
    fn countable_spec_truncates_in_order() {
        let gen = PoleGenerator::BoundarySchedule {
            schedule: BoundarySchedule::new(0.9).unwrap(),
            weight: 1.0,
        };
        let spec = PoleSpec::countable(gen, 8).unwrap();
        assert_eq!(spec.len(), 8);
        let a3 = spec.truncate(3).unwrap();
        assert_eq!(a3.len(), 3);
        assert!((a3.poles()[2].point[0].re - (1.0 - 0.1 / 9.0)).abs() < 1e-15);
        assert_eq!(spec.restrict(&[]), Err(Error::EmptyPoleSet));
    }

    #[test]
    fn config_defaults_match_documented_values() {
        let cfg = OptimizerConfig::default();
        assert_eq!(cfg.restarts, 32);
        assert_eq!(cfg.max_iterations, 2000);
        assert_eq!(cfg.branch_bound, 5);
        assert_eq!(cfg.boundary_samples, 1024);
        assert_eq!(cfg.margin_floor, 1e-9);
        assert_eq!(cfg.seed, 42);
    }
}
