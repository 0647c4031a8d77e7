//! Scalar function theory on the unit disc: Möbius factors, finite Blaschke
//! products, Blaschke interpolation series and multipole Green functions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum distance between interpolation nodes. Closer nodes make the
/// normalising values `B_j(λ_j)` lose too many digits to cancellation.
pub const NODE_SEPARATION_FLOOR: f64 = 1e-3;

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDiscPoint(Complex64);

impl UnitDiscPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if value.is_finite() && value.norm() < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::OutsideUnitDisc {
                re: value.re,
                im: value.im,
            })
        }
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn origin() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl fmt::Display for UnitDiscPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pseudo-hyperbolic distance `|(z − a)/(1 − ā z)|`.
pub fn mobius_factor(a: UnitDiscPoint, z: UnitDiscPoint) -> f64 {
    let (a, z) = (a.0, z.0);
    ((z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)).norm()
}

/// Countable node families `λ_j = 1 − (1 − t)/j²`, `j ≥ 1`, which satisfy
/// the Blaschke condition with `Σ (1 − λ_j) ≤ (1 − t)π²/6`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySchedule {
    pub t: f64,
}

impl BoundarySchedule {
    pub const ID: &'static str = "boundary-schedule";

    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "schedule parameter t = {t} must lie in [0, 1)"
            )));
        }
        Ok(Self { t })
    }

    /// The `j`-th point, `j ≥ 1`.
    pub fn point(&self, j: usize) -> f64 {
        assert!(j >= 1, "schedule is indexed from 1");
        1.0 - (1.0 - self.t) / (j * j) as f64
    }

    /// Upper bound for `Σ_j (1 − |λ_j|)` over the whole family.
    pub fn blaschke_bound(&self) -> f64 {
        (1.0 - self.t) * std::f64::consts::PI.powi(2) / 6.0
    }
}

/// A truncated countable family together with its Blaschke-condition witness.
#[derive(Clone, Debug, PartialEq)]
pub struct CountableFamily {
    pub generator_id: String,
    pub truncation_length: usize,
    pub witness_bound: f64,
}

/// An ordered list of distinct zeros in the unit disc.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSequence {
    zeros: Vec<UnitDiscPoint>,
    family: Option<CountableFamily>,
}

impl ZeroSequence {
    pub fn finite(zeros: Vec<UnitDiscPoint>) -> Result<Self> {
        check_distinct(&zeros, 0.0)?;
        Ok(Self { zeros, family: None })
    }

    pub fn from_values(values: &[Complex64]) -> Result<Self> {
        let zeros = values
            .iter()
            .map(|&v| UnitDiscPoint::new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::finite(zeros)
    }

    /// The first `truncation_length` points of a boundary schedule. The
    /// partial sums of `1 − |λ_j|` are checked against the schedule's bound.
    pub fn from_schedule(schedule: BoundarySchedule, truncation_length: usize) -> Result<Self> {
        let bound = schedule.blaschke_bound();
        let mut partial = 0.0;
        let mut zeros = Vec::with_capacity(truncation_length);
        for j in 1..=truncation_length {
            let x = schedule.point(j);
            partial += 1.0 - x;
            if partial > bound * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "Blaschke witness violated at j = {j}: {partial} > {bound}"
                )));
            }
            zeros.push(UnitDiscPoint::real(x)?);
        }
        check_distinct(&zeros, 0.0)?;
        Ok(Self {
            zeros,
            family: Some(CountableFamily {
                generator_id: BoundarySchedule::ID.to_string(),
                truncation_length,
                witness_bound: bound,
            }),
        })
    }

    pub fn zeros(&self) -> &[UnitDiscPoint] {
        &self.zeros
    }

    pub fn family(&self) -> Option<&CountableFamily> {
        self.family.as_ref()
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

fn check_distinct(points: &[UnitDiscPoint], floor: f64) -> Result<()> {
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let gap = (points[i].0 - points[j].0).norm();
            if gap <= floor {
                return Err(Error::RepeatedNodes(format!(
                    "points {i} and {j} are {gap:e} apart (floor {floor:e})"
                )));
            }
        }
    }
    Ok(())
}

/// The factor `(|a|/a)(a − λ)/(1 − ā λ)`, or `λ` when `a = 0`.
fn blaschke_factor(a: Complex64, lambda: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if a == Complex64::new(0.0, 0.0) {
        lambda
    } else {
        (a.norm() / a) * (a - lambda) / (one - a.conj() * lambda)
    }
}

/// Finite Blaschke product with the given zeros, normalised so that
/// `B(0) = ∏ |z_j|` for nonzero zeros.
///
/// `λ` may lie on the unit circle, where `|B| = 1`.
pub fn blaschke_product(zeros: &ZeroSequence, lambda: Complex64) -> Result<Complex64> {
    if !lambda.is_finite() || lambda.norm() > 1.0 {
        return Err(Error::OutsideUnitDisc {
            re: lambda.re,
            im: lambda.im,
        });
    }
    Ok(zeros.zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, z| {
        acc * blaschke_factor(z.0, lambda)
    }))
}

type WeightExponent = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// `λ ↦ e^{ζ(λ)} Σ_j γ_j B_j(λ) / (e^{ζ(λ_j)} B_j(λ_j))`, where `B_j` is the
/// Blaschke product over all nodes except `λ_j`.
#[derive(Clone)]
pub struct BlaschkeInterpolant {
    nodes: Vec<Complex64>,
    values: Vec<Complex64>,
    denominators: Vec<Complex64>,
    weight_exponent: Option<WeightExponent>,
}

impl fmt::Debug for BlaschkeInterpolant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlaschkeInterpolant")
            .field("nodes", &self.nodes)
            .field("values", &self.values)
            .field("weighted", &self.weight_exponent.is_some())
            .finish()
    }
}

impl BlaschkeInterpolant {
    fn partial_product(&self, skip: usize, lambda: Complex64) -> Complex64 {
        self.nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .fold(Complex64::new(1.0, 0.0), |acc, (_, &a)| {
                acc * blaschke_factor(a, lambda)
            })
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let sum: Complex64 = (0..self.nodes.len())
            .map(|j| self.values[j] * self.partial_product(j, lambda) / self.denominators[j])
            .sum();
        match &self.weight_exponent {
            Some(zeta) => zeta(lambda).exp() * sum,
            None => sum,
        }
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }
}

/// Builds the Blaschke interpolation series through `(λ_j, γ_j)`.
///
/// `weight_exponent` is the optional `ζ` of the series; `None` means `ζ ≡ 0`.
/// Nodes must be pairwise at least [`NODE_SEPARATION_FLOOR`] apart.
pub fn blaschke_interpolate(
    nodes: &ZeroSequence,
    values: &[Complex64],
    weight_exponent: Option<WeightExponent>,
) -> Result<BlaschkeInterpolant> {
    if nodes.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            actual: values.len(),
        });
    }
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("no interpolation nodes".into()));
    }
    check_distinct(&nodes.zeros, 0.0)?;
    check_distinct(&nodes.zeros, NODE_SEPARATION_FLOOR)?;
    let mut out = BlaschkeInterpolant {
        nodes: nodes.zeros.iter().map(|z| z.0).collect(),
        values: values.to_vec(),
        denominators: Vec::new(),
        weight_exponent,
    };
    out.denominators = (0..out.nodes.len())
        .map(|j| {
            let b = out.partial_product(j, out.nodes[j]);
            match &out.weight_exponent {
                Some(zeta) => zeta(out.nodes[j]).exp() * b,
                None => b,
            }
        })
        .collect();
    Ok(out)
}

/// `∏_j mobius_factor(a_j, z)^{p_j}`: the Green function of the disc with
/// weighted poles, in multiplicative form.
pub fn green_disc_multipole(poles: &[(UnitDiscPoint, f64)], z: UnitDiscPoint) -> Result<f64> {
    if poles.is_empty() {
        return Err(Error::EmptyPoleSet);
    }
    let points: Vec<UnitDiscPoint> = poles.iter().map(|p| p.0).collect();
    check_distinct(&points, 0.0)?;
    let mut value = 1.0;
    for &(a, weight) in poles {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidWeight(weight));
        }
        value *= mobius_factor(a, z).powf(weight);
    }
    Ok(value)
}
