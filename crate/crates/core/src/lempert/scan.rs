//! Upper bounds for countable pole sets through their finite truncations.

use num_complex::Complex64;

use crate::domains::Domain;
use crate::error::{Error, Result};

use super::{estimate_lempert_warm, extend_competitor, Estimate, OptimizerConfig, PoleGenerator, PoleSpec};

/// The scan stops once two successive values differ by less than this.
pub const STOP_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct ScanReport {
    /// Estimates for `A_1, A_2, …`.
    pub estimates: Vec<Estimate>,
    /// Whether the estimate for `A_m` was seeded by extending the previous
    /// competitor with one node.
    pub extended: Vec<bool>,
    pub nonincreasing: bool,
    /// The generator ran out of poles before `m_max`.
    pub exhausted: bool,
    /// The `m` at which successive values first differed by less than
    /// [`STOP_TOLERANCE`].
    pub stopped_at: Option<usize>,
}

impl ScanReport {
    pub fn values(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.value).collect()
    }
}

/// Estimates `l_D(p_{A_m}, z)` for `m = 1, …, m_max`, warm-starting each
/// step from the previous competitor extended by a preimage of the new pole,
/// so the values cannot increase while extensions succeed.
pub fn finite_truncation_scan(
    domain: &Domain,
    generator: &PoleGenerator,
    z: &[Complex64],
    m_max: usize,
    config: &OptimizerConfig,
) -> Result<ScanReport> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    let mut report = ScanReport {
        estimates: Vec::new(),
        extended: Vec::new(),
        nonincreasing: true,
        exhausted: false,
        stopped_at: None,
    };
    let mut previous: Option<PoleSpec> = None;
    let mut tail = 0.0;
    for m in 1..=m_max {
        let Some(pole) = generator.pole(m) else {
            report.exhausted = true;
            break;
        };
        tail += 1.0 - pole.point.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if tail > generator.blaschke_bound() * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument("Blaschke witness violated".into()));
        }
        let mut poles = previous.as_ref().map(|s| s.poles().to_vec()).unwrap_or_default();
        poles.push(pole);
        let spec = PoleSpec::finite(poles)?;

        let warm = match (&previous, report.estimates.last()) {
            (
                Some(prev),
                Some(Estimate {
                    competitor: Some(c), ..
                }),
            ) => extend_competitor(c, &prev.points(), &spec, config.branch_bound),
            _ => None,
        };
        report.extended.push(warm.is_some());
        let estimate = estimate_lempert_warm(domain, &spec, z, config, warm.as_slice())?;
        if let Some(last) = report.estimates.last() {
            if estimate.value > last.value {
                report.nonincreasing = false;
            }
            if report.stopped_at.is_none() && (last.value - estimate.value).abs() < STOP_TOLERANCE {
                report.stopped_at = Some(m);
            }
        }
        report.estimates.push(estimate);
        previous = Some(spec);
        if report.stopped_at.is_some() {
            break;
        }
    }
    Ok(report)
}
