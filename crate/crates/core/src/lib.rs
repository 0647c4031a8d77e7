//! Numerical estimation of multipole weighted Lempert functions.
//!
//! For a domain `D ⊂ Cⁿ`, a finite pole set `A = {a_j}` with positive weights
//! `p_j` and a point `z ∈ D`, the Lempert function with weighted poles is
//!
//! ```text
//! l_D(p, z) = inf ∏ |λ_j|^{p_j}
//! ```
//!
//! over analytic discs `φ: 𝔻 → D` with `φ(0) = z` and `φ(λ_j) = a_j`. Any such
//! disc (a *competitor*) gives an upper bound. This crate searches over
//! polynomial competitors whose interpolation constraints hold by construction,
//! certifies that each accepted disc maps the closed unit disc into the domain,
//! and compares the resulting upper bounds with closed-form values on the
//! unit disc, the bidisc and the punctured disc.
//!
//! Countable and larger pole sets enter only through finite sub-pole-sets: the
//! value for a pole function is the infimum over its finite restrictions, which
//! [`lempert::finite_truncation_scan`] approximates from above.

pub mod blaschke;
pub mod discs;
pub mod domains;
pub mod error;
pub mod lempert;
pub mod optimize;
pub mod poly;
pub mod records;

pub use num_complex::Complex64;

pub use blaschke::{
    blaschke_interpolate, blaschke_product, green_disc_multipole, mobius_factor, BlaschkeInterpolant,
    UnitDiscPoint, ZeroSequence,
};
pub use discs::{AnalyticDisc, Competitor, Representation};
pub use domains::{CertificationMethod, ContainmentCertificate, Domain};
pub use error::{Error, Result};
pub use lempert::{Estimate, OptimizerConfig, Pole, PoleSpec};
pub use poly::Poly;
