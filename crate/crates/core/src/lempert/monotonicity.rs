//! Monotonicity of the estimates in the pole function.

use num_complex::Complex64;

use crate::domains::Domain;
use crate::error::{Error, Result};

use super::{
    estimate_lempert, estimate_lempert_warm, extend_competitor, Estimate, OptimizerConfig, PoleSpec,
};

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub p_estimate: Estimate,
    pub q_estimate: Estimate,
    /// Whether the `p` competitor could be carried over to `q`.
    pub transferred: bool,
    /// `q` value ≤ `p` value.
    pub ordered: bool,
}

/// Checks `p ≤ q`: each pole of `p` is a pole of `q` with at least its
/// weight.
fn dominates(p: &PoleSpec, q: &PoleSpec) -> Result<()> {
    for (i, pole) in p.poles().iter().enumerate() {
        let matching = q
            .poles()
            .iter()
            .find(|o| o.point == pole.point)
            .ok_or_else(|| Error::InvalidArgument(format!("pole {i} of p is not a pole of q")))?;
        if matching.weight < pole.weight {
            return Err(Error::InvalidArgument(format!(
                "weight of pole {i} drops from {} to {}",
                pole.weight, matching.weight
            )));
        }
    }
    Ok(())
}

/// Estimates `l_D(p, z)` and `l_D(q, z)` for `p ≤ q`, seeding the `q` search
/// with the `p` competitor. Heavier weights and extra nodes only shrink the
/// objective, so the `q` value cannot exceed the `p` value when the transfer
/// succeeds.
pub fn check_monotonicity(
    domain: &Domain,
    p: &PoleSpec,
    q: &PoleSpec,
    z: &[Complex64],
    config: &OptimizerConfig,
) -> Result<MonotonicityReport> {
    dominates(p, q)?;
    let p_estimate = estimate_lempert(domain, p, z, config)?;
    let warm = p_estimate
        .competitor
        .as_ref()
        .and_then(|c| extend_competitor(c, &p.points(), q, config.branch_bound));
    let transferred = warm.is_some();
    let q_estimate = estimate_lempert_warm(domain, q, z, config, warm.as_slice())?;
    Ok(MonotonicityReport {
        ordered: q_estimate.value <= p_estimate.value,
        transferred,
        p_estimate,
        q_estimate,
    })
}
