//! Closed-form values of the objective's infimum on model domains.

use num_complex::Complex64;

use crate::blaschke::{green_disc_multipole, mobius_factor, UnitDiscPoint};
use crate::discs::lift_point;
use crate::error::{Error, Result};

use super::PoleSpec;

fn scalar_poles(spec: &PoleSpec) -> Result<Vec<(Complex64, f64)>> {
    spec.poles()
        .iter()
        .map(|p| match p.point.as_slice() {
            [a] => Ok((*a, p.weight)),
            other => Err(Error::DimensionMismatch {
                expected: 1,
                actual: other.len(),
            }),
        })
        .collect()
}

/// The multipole Green product `∏ m(a_j, z)^{p_j}`, which is the exact value
/// on the unit disc.
pub fn lempert_disc_oracle(spec: &PoleSpec, z: Complex64) -> Result<f64> {
    let poles = scalar_poles(spec)?
        .into_iter()
        .map(|(a, w)| UnitDiscPoint::new(a).map(|p| (p, w)))
        .collect::<Result<Vec<_>>>()?;
    green_disc_multipole(&poles, UnitDiscPoint::new(z)?)
}

/// `max{g(B, z), m(b, w)}` for poles `B × {b}` of the bidisc, each with
/// weight one.
pub fn lempert_product_oracle(spec: &PoleSpec, point: &[Complex64]) -> Result<f64> {
    let [z, w] = point else {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: point.len(),
        });
    };
    let mut first = Vec::with_capacity(spec.len());
    let mut height = None;
    for pole in spec.poles() {
        let [a, b] = pole.point.as_slice() else {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: pole.point.len(),
            });
        };
        if pole.weight != 1.0 {
            return Err(Error::InvalidArgument(
                "product oracle needs every weight equal to one".into(),
            ));
        }
        match height {
            None => height = Some(*b),
            Some(h) if h == *b => {}
            Some(_) => {
                return Err(Error::InvalidArgument(
                    "poles do not share one second coordinate".into(),
                ))
            }
        }
        first.push((UnitDiscPoint::new(*a)?, 1.0));
    }
    let b = UnitDiscPoint::new(height.ok_or(Error::EmptyPoleSet)?)?;
    let w = UnitDiscPoint::new(*w)?;
    let g = green_disc_multipole(&first, UnitDiscPoint::new(*z)?)?;
    Ok(g.max(mobius_factor(b, w)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PuncturedOracle {
    pub value: f64,
    /// Whether widening the branch range by five left the value unchanged.
    pub converged: bool,
}

/// Lifts the poles through `exp ∘ cayley` and minimizes each factor
/// `m(ã_j^{(k)}, ž)` over branches `|k| ≤ K`, with `ž` the principal lift.
pub fn lempert_punctured_oracle(spec: &PoleSpec, z: Complex64, branch_bound: i64) -> Result<PuncturedOracle> {
    if branch_bound < 1 {
        return Err(Error::InvalidArgument("branch bound must be at least 1".into()));
    }
    let poles = scalar_poles(spec)?;
    let z_lift = UnitDiscPoint::new(lift_point(z, 0)?)?;
    let value_with = |bound: i64| -> Result<f64> {
        let mut value = 1.0;
        for &(a, weight) in &poles {
            let mut best = f64::INFINITY;
            for k in -bound..=bound {
                best = best.min(mobius_factor(UnitDiscPoint::new(lift_point(a, k)?)?, z_lift));
            }
            value *= best.powf(weight);
        }
        Ok(value)
    };
    let value = value_with(branch_bound)?;
    let wider = value_with(branch_bound + 5)?;
    Ok(PuncturedOracle {
        value,
        converged: value == wider,
    })
}
