//! Model target domains and containment certificates for analytic discs.
//!
//! Certification works on the unit circle: every domain here is described by
//! a gauge (a modulus, a Euclidean norm, or a real part) that is
//! subharmonic along the disc, so the maximum over the closed disc is attained
//! on the circle. The circle is sampled at `M` points and the gap between
//! samples is controlled by coefficient bounds on the angular derivatives.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discs::{cayley, AnalyticDisc, Representation};
use crate::error::{Error, Result};
use crate::poly::Poly;

pub const DEFAULT_BOUNDARY_SAMPLES: usize = 1024;
pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-9;

/// Relative allowance for rounding in the sampled maxima.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    UnitDisc,
    Polydisc { n: usize },
    PuncturedDisc,
    EuclideanBall { n: usize },
    Product { factors: Vec<Domain> },
}

/// How a group of coordinates is constrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// `|z| < 1`.
    Disc,
    /// `0 < |z| < 1`.
    Punctured,
    /// `‖z‖₂ < 1` over the block's coordinates.
    Ball,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub components: Range<usize>,
}

impl Domain {
    pub fn bidisc() -> Self {
        Domain::Polydisc { n: 2 }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::UnitDisc | Domain::PuncturedDisc => 1,
            Domain::Polydisc { n } | Domain::EuclideanBall { n } => *n,
            Domain::Product { factors } => factors.iter().map(Domain::dimension).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Polydisc { n } | Domain::EuclideanBall { n } if *n == 0 => {
                Err(Error::InvalidArgument("domain dimension must be positive".into()))
            }
            Domain::Product { factors } if factors.is_empty() => Err(Error::InvalidArgument(
                "product domain needs at least one factor".into(),
            )),
            Domain::Product { factors } => factors.iter().try_for_each(Domain::validate),
            _ => Ok(()),
        }
    }

    /// Coordinate blocks in order; a product concatenates its factors' blocks.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        self.push_blocks(0, &mut out);
        out
    }

    fn push_blocks(&self, offset: usize, out: &mut Vec<Block>) {
        match self {
            Domain::UnitDisc => out.push(Block {
                kind: BlockKind::Disc,
                components: offset..offset + 1,
            }),
            Domain::PuncturedDisc => out.push(Block {
                kind: BlockKind::Punctured,
                components: offset..offset + 1,
            }),
            Domain::Polydisc { n } => out.extend((0..*n).map(|k| Block {
                kind: BlockKind::Disc,
                components: offset + k..offset + k + 1,
            })),
            Domain::EuclideanBall { n } => out.push(Block {
                kind: BlockKind::Ball,
                components: offset..offset + n,
            }),
            Domain::Product { factors } => {
                let mut at = offset;
                for f in factors {
                    f.push_blocks(at, out);
                    at += f.dimension();
                }
            }
        }
    }

    fn check_dimension(&self, point: &[Complex64]) -> Result<()> {
        if point.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: point.len(),
            });
        }
        Ok(())
    }

    /// Exact membership in the open domain.
    pub fn contains(&self, point: &[Complex64]) -> Result<bool> {
        self.check_dimension(point)?;
        Ok(self.blocks().iter().all(|b| {
            let coords = &point[b.components.clone()];
            match b.kind {
                BlockKind::Disc => coords[0].norm() < 1.0,
                BlockKind::Punctured => {
                    let r = coords[0].norm();
                    r > 0.0 && r < 1.0
                }
                BlockKind::Ball => coords.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0,
            }
        }))
    }

    /// Distance from `point` to the complement, in the sup-norm over
    /// coordinates (Euclidean inside a ball block).
    pub fn boundary_distance(&self, point: &[Complex64]) -> Result<f64> {
        if !self.contains(point)? {
            return Err(Error::OutsideDomain);
        }
        Ok(self
            .blocks()
            .iter()
            .map(|b| {
                let coords = &point[b.components.clone()];
                match b.kind {
                    BlockKind::Disc => 1.0 - coords[0].norm(),
                    BlockKind::Punctured => {
                        let r = coords[0].norm();
                        (1.0 - r).min(r)
                    }
                    BlockKind::Ball => 1.0 - coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
                }
            })
            .fold(f64::INFINITY, f64::min))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationMethod {
    CoefficientBound,
    BoundarySamplingPlusModulus,
    ExponentialLift,
}

/// A lower bound `margin` on the distance from the image of the closed unit
/// disc to the complement of the domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCertificate {
    pub certified: bool,
    pub margin: f64,
    pub method: CertificationMethod,
}

impl ContainmentCertificate {
    fn from_margin(margin: f64, floor: f64, method: CertificationMethod) -> Self {
        let certified = margin.is_finite() && margin > floor && margin > 0.0;
        Self {
            certified,
            margin: if margin.is_finite() { margin.max(0.0) } else { 0.0 },
            method,
        }
    }

    fn rejected(method: CertificationMethod) -> Self {
        Self {
            certified: false,
            margin: 0.0,
            method,
        }
    }
}

/// Samples `e^{2πik/M}`, `k = 0..M`.
pub fn circle_samples(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
        .collect()
}

/// Largest `‖g(θ_k) ± h·g'(θ_k)‖₂` over the samples, where `g(θ)` is the
/// vector of `p(e^{iθ})` over `components`. Adding `h²/2 · sup‖g''‖` bounds
/// `‖g‖` on the whole circle by Taylor's theorem.
fn second_order_samples(components: &[Poly], derivatives: &[Poly], samples: &[Complex64], h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for &u in samples {
        let (mut plus, mut minus) = (0.0, 0.0);
        for (p, d) in components.iter().zip(derivatives) {
            let value = p.eval(u);
            let step = Complex64::i() * u * d.eval(u) * h;
            plus += (value + step).norm_sqr();
            minus += (value - step).norm_sqr();
        }
        worst = worst.max(f64::max(plus, minus).sqrt());
    }
    worst
}

/// Upper bound on `sup ‖φ(λ)‖₂` over the closed disc for a group of
/// components, with whether the coefficient bound was the binding one.
fn euclidean_bound(components: &[Poly], samples: &[Complex64]) -> (f64, bool) {
    let h = PI / samples.len() as f64;
    let sampled = samples
        .iter()
        .map(|&u| {
            components
                .iter()
                .map(|p| p.eval(u).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
        * (1.0 + ROUNDING_SLACK);
    let moment = |order: u32| {
        components
            .iter()
            .map(|p| p.coefficient_moment(order).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let coefficient = moment(0) * (1.0 + ROUNDING_SLACK);
    let first_order = sampled + h * moment(1);
    let degree = components.iter().map(Poly::degree).max().unwrap_or(0);
    let hd2 = (h * degree as f64).powi(2) / 2.0;
    let bernstein = if hd2 < 1.0 {
        sampled / (1.0 - hd2).sqrt()
    } else {
        f64::INFINITY
    };
    let derivatives: Vec<Poly> = components.iter().map(Poly::derivative).collect();
    let second_order = second_order_samples(components, &derivatives, samples, h) * (1.0 + ROUNDING_SLACK)
        + h * h / 2.0 * moment(2);
    let sampled_best = first_order.min(bernstein).min(second_order);
    if coefficient <= sampled_best {
        (coefficient, true)
    } else {
        (sampled_best, false)
    }
}

/// Upper bound on `sup_{|λ|≤1} |p(λ)|`, with the binding bound kind.
fn modulus_bound(p: &Poly, samples: &[Complex64]) -> (f64, bool) {
    euclidean_bound(std::slice::from_ref(p), samples)
}

/// Lower bound on `inf_{|λ|=1} |p(λ)|`.
fn modulus_lower_bound(p: &Poly, samples: &[Complex64]) -> f64 {
    let h = PI / samples.len() as f64;
    let sampled = samples
        .iter()
        .map(|&u| p.eval(u).norm())
        .fold(f64::INFINITY, f64::min);
    sampled * (1.0 - ROUNDING_SLACK) - h * p.coefficient_moment(1)
}

/// Upper bound on `Re ψ` over the closed disc.
fn real_part_upper_bound(psi: &Poly, samples: &[Complex64]) -> f64 {
    let h = PI / samples.len() as f64;
    let hi = samples
        .iter()
        .map(|&u| psi.eval(u).re)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = ROUNDING_SLACK * psi.coefficient_moment(0);
    let gap = (h * psi.coefficient_moment(1)).min(h * h / 2.0 * psi.coefficient_moment(2));
    let tail = psi.coefficient_moment(0) - psi.coeffs()[0].norm();
    (hi + gap + slack).min(psi.coeffs()[0].re + tail)
}

/// Distance from the unit circle to `exp ∘ cayley` of `|u| ≤ beta`, using
/// `Re cayley(u) ≤ −(1 − |u|)/(1 + |u|)`.
pub(crate) fn covering_margin(beta: f64) -> f64 {
    if !(beta < 1.0) {
        return f64::NEG_INFINITY;
    }
    1.0 - (-(1.0 - beta) / (1.0 + beta)).exp()
}

/// Certifies with [`DEFAULT_BOUNDARY_SAMPLES`] and [`DEFAULT_MARGIN_FLOOR`].
pub fn certify_disc_in_domain(domain: &Domain, disc: &AnalyticDisc) -> Result<ContainmentCertificate> {
    certify_disc_in_domain_with(domain, disc, DEFAULT_BOUNDARY_SAMPLES, DEFAULT_MARGIN_FLOOR)
}

/// Sound (not complete) check that `disc` maps the closed unit disc into
/// `domain`. A negative answer may be conservative.
pub fn certify_disc_in_domain_with(
    domain: &Domain,
    disc: &AnalyticDisc,
    samples: usize,
    margin_floor: f64,
) -> Result<ContainmentCertificate> {
    if disc.dimension() != domain.dimension() {
        return Err(Error::DimensionMismatch {
            expected: domain.dimension(),
            actual: disc.dimension(),
        });
    }
    let samples = circle_samples(samples.max(8));
    match disc.representation() {
        Representation::Polynomial(components) => {
            let mut margin = f64::INFINITY;
            let mut all_coefficient = true;
            for block in domain.blocks() {
                let comps = &components[block.components.clone()];
                let block_margin = match block.kind {
                    BlockKind::Disc => {
                        let (bound, coef) = modulus_bound(&comps[0], &samples);
                        all_coefficient &= coef;
                        1.0 - bound
                    }
                    BlockKind::Ball => {
                        let (bound, coef) = euclidean_bound(comps, &samples);
                        all_coefficient &= coef;
                        1.0 - bound
                    }
                    BlockKind::Punctured => {
                        all_coefficient = false;
                        let p = &comps[0];
                        let (bound, _) = modulus_bound(p, &samples);
                        let zero_free = p.roots().iter().all(|r| r.norm() > 1.0 + 1e-9);
                        if !zero_free {
                            f64::NEG_INFINITY
                        } else {
                            (1.0 - bound).min(modulus_lower_bound(p, &samples))
                        }
                    }
                };
                margin = margin.min(block_margin);
            }
            let method = if all_coefficient {
                CertificationMethod::CoefficientBound
            } else {
                CertificationMethod::BoundarySamplingPlusModulus
            };
            Ok(ContainmentCertificate::from_margin(margin, margin_floor, method))
        }
        Representation::ExpLift(psi) => {
            if *domain != Domain::PuncturedDisc {
                return Ok(ContainmentCertificate::rejected(
                    CertificationMethod::ExponentialLift,
                ));
            }
            // A lift never vanishes on the compact closed disc, so only the
            // outer bound is checked.
            let upper = real_part_upper_bound(psi, &samples);
            let margin = if upper < 0.0 {
                1.0 - upper.exp()
            } else {
                f64::NEG_INFINITY
            };
            Ok(ContainmentCertificate::from_margin(
                margin,
                margin_floor,
                CertificationMethod::ExponentialLift,
            ))
        }
        Representation::CoveringLift(inner) => {
            if *domain != Domain::PuncturedDisc {
                return Ok(ContainmentCertificate::rejected(
                    CertificationMethod::ExponentialLift,
                ));
            }
            let (beta, _) = modulus_bound(inner, &samples);
            Ok(ContainmentCertificate::from_margin(
                covering_margin(beta),
                margin_floor,
                CertificationMethod::ExponentialLift,
            ))
        }
    }
}

/// The covering map `exp ∘ cayley` from the disc onto the punctured disc.
pub fn covering_map(u: Complex64) -> Complex64 {
    cayley(u).exp()
}
