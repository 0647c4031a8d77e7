//! Analytic discs, interpolation-constrained competitors, shrinking and
//! restriction to sub-pole-sets.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::blaschke::NODE_SEPARATION_FLOOR;
use crate::domains::ContainmentCertificate;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Residual allowed in the interpolation constraints of a competitor.
pub const INTERPOLATION_TOLERANCE: f64 = 1e-10;

/// `u ↦ (u + 1)/(u − 1)`, the involution exchanging the unit disc and the
/// left half-plane.
pub fn cayley(u: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    (u + one) / (u - one)
}

/// The lift of `a ∈ 𝔻*` on branch `k` under `exp ∘ cayley`:
/// `cayley(log a + 2πik)`.
pub fn lift_point(a: Complex64, branch: i64) -> Result<Complex64> {
    let r = a.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutsideDomain);
    }
    Ok(cayley(a.ln() + Complex64::new(0.0, TAU * branch as f64)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    /// One polynomial per coordinate.
    Polynomial(Vec<Poly>),
    /// `λ ↦ exp(ψ(λ))` with `ψ` a polynomial into the left half-plane.
    ExpLift(Poly),
    /// `λ ↦ exp(cayley(u(λ)))` with `u` a polynomial into the unit disc; the
    /// half-plane lift is `cayley ∘ u`.
    CoveringLift(Poly),
}

impl Representation {
    pub fn name(&self) -> &'static str {
        match self {
            Representation::Polynomial(_) => "polynomial",
            Representation::ExpLift(_) => "exp_lift",
            Representation::CoveringLift(_) => "covering_lift",
        }
    }

    /// The underlying polynomials: the coordinates, or the single inner map.
    pub fn polynomials(&self) -> &[Poly] {
        match self {
            Representation::Polynomial(ps) => ps,
            Representation::ExpLift(p) | Representation::CoveringLift(p) => std::slice::from_ref(p),
        }
    }

    fn map_polys(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        match self {
            Representation::Polynomial(ps) => Representation::Polynomial(ps.iter().map(f).collect()),
            Representation::ExpLift(p) => Representation::ExpLift(f(p)),
            Representation::CoveringLift(p) => Representation::CoveringLift(f(p)),
        }
    }
}

/// A holomorphic map from the unit disc into `Cⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticDisc {
    representation: Representation,
    degree_budget: usize,
}

impl AnalyticDisc {
    fn from_representation(representation: Representation) -> Self {
        let degree_budget = representation
            .polynomials()
            .iter()
            .map(Poly::degree)
            .max()
            .unwrap_or(0);
        Self {
            representation,
            degree_budget,
        }
    }

    pub fn polynomial(components: Vec<Poly>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "a disc needs at least one component".into(),
            ));
        }
        Ok(Self::from_representation(Representation::Polynomial(components)))
    }

    pub fn constant(point: &[Complex64]) -> Self {
        Self::from_representation(Representation::Polynomial(
            point.iter().map(|&c| Poly::constant(c)).collect(),
        ))
    }

    pub fn exp_lift(psi: Poly) -> Result<Self> {
        Ok(Self::from_representation(Representation::ExpLift(psi)))
    }

    pub fn covering_lift(inner: Poly) -> Result<Self> {
        Ok(Self::from_representation(Representation::CoveringLift(inner)))
    }

    /// Raises or lowers the degree budget; fails if a component already
    /// exceeds it.
    pub fn with_degree_budget(mut self, budget: usize) -> Result<Self> {
        if self
            .representation
            .polynomials()
            .iter()
            .any(|p| p.degree() > budget)
        {
            return Err(Error::InvalidArgument(format!(
                "component degree exceeds the budget {budget}"
            )));
        }
        self.degree_budget = budget;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        match &self.representation {
            Representation::Polynomial(ps) => ps.len(),
            _ => 1,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn degree_budget(&self) -> usize {
        self.degree_budget
    }

    /// Evaluation without the closed-disc check. Polynomials are entire, so
    /// this is meaningful for any `λ`.
    pub(crate) fn eval_unchecked(&self, lambda: Complex64) -> Vec<Complex64> {
        match &self.representation {
            Representation::Polynomial(ps) => ps.iter().map(|p| p.eval(lambda)).collect(),
            Representation::ExpLift(psi) => vec![psi.eval(lambda).exp()],
            Representation::CoveringLift(u) => vec![cayley(u.eval(lambda)).exp()],
        }
    }

    /// `λ ↦ φ(sλ)`.
    pub fn rescale(&self, s: f64) -> Self {
        Self {
            representation: self.representation.map_polys(|p| p.rescale_argument(s)),
            degree_budget: self.degree_budget,
        }
    }
}

/// Evaluates a disc on the closed unit disc.
pub fn eval_disc(disc: &AnalyticDisc, lambda: Complex64) -> Result<Vec<Complex64>> {
    if !lambda.is_finite() || lambda.norm() > 1.0 {
        return Err(Error::OutsideUnitDisc {
            re: lambda.re,
            im: lambda.im,
        });
    }
    Ok(disc.eval_unchecked(lambda))
}

/// A node preimage `λ_j` and the index of the pole it is sent to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub lambda: Complex64,
    pub pole_index: usize,
}

/// An analytic disc through `z` at `0` and through each pole at its node.
#[derive(Clone, Debug, PartialEq)]
pub struct Competitor {
    pub disc: AnalyticDisc,
    pub base_point: Vec<Complex64>,
    pub nodes: Vec<Node>,
    pub certificate: ContainmentCertificate,
    /// Branch integers of the pole lifts, for covering-lift discs.
    pub branches: Option<Vec<i64>>,
}

impl Competitor {
    pub fn new(
        disc: AnalyticDisc,
        base_point: Vec<Complex64>,
        nodes: Vec<Node>,
        certificate: ContainmentCertificate,
    ) -> Result<Self> {
        check_nodes(&nodes.iter().map(|n| n.lambda).collect::<Vec<_>>(), 0.0)?;
        if base_point.len() != disc.dimension() {
            return Err(Error::DimensionMismatch {
                expected: disc.dimension(),
                actual: base_point.len(),
            });
        }
        let at_zero = disc.eval_unchecked(Complex64::new(0.0, 0.0));
        let residual = max_distance(&at_zero, &base_point);
        if !(residual <= INTERPOLATION_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "disc misses the base point by {residual:e}"
            )));
        }
        Ok(Self {
            disc,
            base_point,
            nodes,
            certificate,
            branches: None,
        })
    }

    pub fn with_branches(mut self, branches: Vec<i64>) -> Self {
        self.branches = Some(branches);
        self
    }

    /// Largest sup-norm miss of the interpolation constraints, including the
    /// base point. `poles[i]` is the pole with index `i`.
    pub fn interpolation_residual(&self, poles: &[Vec<Complex64>]) -> f64 {
        let mut worst = max_distance(
            &self.disc.eval_unchecked(Complex64::new(0.0, 0.0)),
            &self.base_point,
        );
        for node in &self.nodes {
            let target = match poles.get(node.pole_index) {
                Some(t) => t,
                None => return f64::INFINITY,
            };
            worst = worst.max(max_distance(&self.disc.eval_unchecked(node.lambda), target));
        }
        worst
    }

    pub fn max_node_modulus(&self) -> f64 {
        self.nodes.iter().map(|n| n.lambda.norm()).fold(0.0, f64::max)
    }
}

fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Nodes must be nonzero, inside the disc and pairwise more than `floor`
/// apart (the origin counts as a node).
pub(crate) fn check_nodes(nodes: &[Complex64], floor: f64) -> Result<()> {
    for (i, n) in nodes.iter().enumerate() {
        if !(n.norm() < 1.0) {
            return Err(Error::OutsideUnitDisc { re: n.re, im: n.im });
        }
        if n.norm() <= floor.max(0.0) {
            return Err(Error::RepeatedNodes(format!("node {i} collides with the origin")));
        }
        for (j, m) in nodes.iter().enumerate().skip(i + 1) {
            if (n - m).norm() <= floor {
                return Err(Error::RepeatedNodes(format!("nodes {i} and {j} collide")));
            }
        }
    }
    Ok(())
}

/// `λ ∏_j (λ − λ_j)`, which vanishes at the origin and every node.
pub(crate) fn node_polynomial(nodes: &[Complex64]) -> Poly {
    let mut roots = Vec::with_capacity(nodes.len() + 1);
    roots.push(Complex64::new(0.0, 0.0));
    roots.extend_from_slice(nodes);
    Poly::from_roots(&roots)
}

/// Coordinate polynomials `L_k + ω·Q_k` with `L_k` the interpolant through
/// `(0, z_k)` and `(λ_j, target_jk)`.
pub(crate) fn interpolating_components(
    z: &[Complex64],
    nodes: &[Complex64],
    targets: &[Vec<Complex64>],
    free_coeffs: &[Vec<Complex64>],
) -> Result<Vec<Poly>> {
    if nodes.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            actual: targets.len(),
        });
    }
    if !free_coeffs.is_empty() && free_coeffs.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            actual: free_coeffs.len(),
        });
    }
    for t in targets {
        if t.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: z.len(),
                actual: t.len(),
            });
        }
    }
    check_nodes(nodes, NODE_SEPARATION_FLOOR)?;
    let mut xs = Vec::with_capacity(nodes.len() + 1);
    xs.push(Complex64::new(0.0, 0.0));
    xs.extend_from_slice(nodes);
    let omega = node_polynomial(nodes);
    (0..z.len())
        .map(|k| {
            let mut ys = Vec::with_capacity(xs.len());
            ys.push(z[k]);
            ys.extend(targets.iter().map(|t| t[k]));
            let lagrange = Poly::lagrange(&xs, &ys)?;
            match free_coeffs.get(k) {
                Some(q) if !q.is_empty() => Ok(&lagrange + &(&omega * &Poly::new(q.clone()))),
                _ => Ok(lagrange),
            }
        })
        .collect()
}

/// Builds `φ(λ) = L(λ) + λ ∏_j (λ − λ_j) Q(λ)` componentwise, where `L` is
/// the Lagrange interpolant through `(0, z)` and `(λ_j, target_j)` and
/// `free_coeffs[k]` are the coefficients of `Q` for coordinate `k` (an empty
/// slice means `Q ≡ 0`).
pub fn build_interpolating_disc(
    z: &[Complex64],
    nodes: &[Complex64],
    targets: &[Vec<Complex64>],
    free_coeffs: &[Vec<Complex64>],
) -> Result<AnalyticDisc> {
    AnalyticDisc::polynomial(interpolating_components(z, nodes, targets, free_coeffs)?)
}

/// Covering-lift disc into the punctured disc: the inner polynomial sends `0`
/// to the principal lift of `z` and `λ_j` to the lift of `a_j` on branch
/// `branches[j]`.
pub fn build_covering_lift_disc(
    z: Complex64,
    nodes: &[Complex64],
    targets: &[Complex64],
    branches: &[i64],
    free_coeffs: &[Complex64],
) -> Result<AnalyticDisc> {
    if targets.len() != branches.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            actual: branches.len(),
        });
    }
    let base = lift_point(z, 0)?;
    let lifted = targets
        .iter()
        .zip(branches)
        .map(|(&a, &k)| lift_point(a, k).map(|l| vec![l]))
        .collect::<Result<Vec<_>>>()?;
    let inner = interpolating_components(&[base], nodes, &lifted, &[free_coeffs.to_vec()])?;
    AnalyticDisc::covering_lift(inner.into_iter().next().expect("one component"))
}

/// Replaces the disc by `λ ↦ φ(sλ)` and each node by `λ_j / s`.
///
/// The image of the closed disc shrinks, so the certificate carries over.
pub fn shrink_competitor(c: &Competitor, s: f64) -> Result<Competitor> {
    if !(s > c.max_node_modulus() && s <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "shrink factor {s} must lie in (max node modulus {}, 1]",
            c.max_node_modulus()
        )));
    }
    if s == 1.0 {
        return Ok(c.clone());
    }
    Ok(Competitor {
        disc: c.disc.rescale(s),
        base_point: c.base_point.clone(),
        nodes: c
            .nodes
            .iter()
            .map(|n| Node {
                lambda: n.lambda / s,
                pole_index: n.pole_index,
            })
            .collect(),
        certificate: c.certificate,
        branches: c.branches.clone(),
    })
}

/// Keeps only the nodes of the poles in `subset` (indices into the original
/// pole list) and renumbers them by their position in `subset`.
pub fn restrict_competitor(c: &Competitor, subset: &[usize]) -> Result<Competitor> {
    if subset.is_empty() {
        return Err(Error::EmptyPoleSet);
    }
    let mut nodes = Vec::with_capacity(subset.len());
    let mut branches = c.branches.as_ref().map(|_| Vec::with_capacity(subset.len()));
    for (new_index, &old) in subset.iter().enumerate() {
        if subset[..new_index].contains(&old) {
            return Err(Error::InvalidArgument(format!("pole index {old} listed twice")));
        }
        let pos = c
            .nodes
            .iter()
            .position(|n| n.pole_index == old)
            .ok_or_else(|| Error::InvalidArgument(format!("no node for pole index {old}")))?;
        nodes.push(Node {
            lambda: c.nodes[pos].lambda,
            pole_index: new_index,
        });
        if let (Some(out), Some(all)) = (branches.as_mut(), c.branches.as_ref()) {
            out.push(all[pos]);
        }
    }
    Ok(Competitor {
        disc: c.disc.clone(),
        base_point: c.base_point.clone(),
        nodes,
        certificate: c.certificate,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{certify_disc_in_domain, Domain};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cayley_is_an_involution_onto_the_half_plane() {
        for u in [c(0.3, 0.1), c(-0.8, 0.5), c(0.0, 0.0)] {
            let w = cayley(u);
            assert!(w.re < 0.0);
            assert!((cayley(w) - u).norm() < 1e-14);
        }
        assert!((cayley(c(-1.0, 0.0)) - c(0.0, 0.0)).norm() < 1e-15);
        assert!((cayley(c(-2.0, 0.0)) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lifts_cover_the_point() {
        let a = c(-0.5, 0.2);
        for k in -3..=3 {
            let l = lift_point(a, k).unwrap();
            assert!(l.norm() < 1.0);
            assert!((cayley(l).exp() - a).norm() < 1e-13);
        }
        assert!(lift_point(c(0.0, 0.0), 0).is_err());
    }

    #[test]
    fn zero_free_coefficients_give_lagrange() {
        let z = [c(0.1, 0.0)];
        let nodes = [c(0.4, 0.2), c(-0.3, 0.5)];
        let targets = vec![vec![c(0.2, 0.2)], vec![c(-0.1, 0.0)]];
        let disc = build_interpolating_disc(&z, &nodes, &targets, &[]).unwrap();
        let xs = [c(0.0, 0.0), nodes[0], nodes[1]];
        let ys = [z[0], targets[0][0], targets[1][0]];
        let lagrange = Poly::lagrange(&xs, &ys).unwrap();
        assert_eq!(disc.representation(), &Representation::Polynomial(vec![lagrange]));
    }

    #[test]
    fn identity_through_half() {
        let disc =
            build_interpolating_disc(&[c(0.0, 0.0)], &[c(0.5, 0.0)], &[vec![c(0.5, 0.0)]], &[]).unwrap();
        for lambda in [c(0.3, 0.1), c(-0.7, 0.2)] {
            assert!((eval_disc(&disc, lambda).unwrap()[0] - lambda).norm() < 1e-15);
        }
    }

    #[test]
    fn constraints_hold_for_any_free_coefficients() {
        let z = [c(0.1, -0.2), c(0.0, 0.3)];
        let nodes = [c(0.6, 0.1), c(-0.2, -0.7), c(0.1, 0.45)];
        let targets = vec![
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(-0.3, 0.3), c(0.2, 0.1)],
            vec![c(0.0, 0.6), c(-0.4, 0.0)],
        ];
        let free = vec![vec![c(3.0, -1.0), c(0.5, 2.0)], vec![c(-7.0, 0.0)]];
        let disc = build_interpolating_disc(&z, &nodes, &targets, &free).unwrap();
        let at0 = eval_disc(&disc, c(0.0, 0.0)).unwrap();
        assert!(max_distance(&at0, &z) < 1e-10);
        for (n, t) in nodes.iter().zip(&targets) {
            assert!(max_distance(&eval_disc(&disc, *n).unwrap(), t) < 1e-10);
        }
    }

    #[test]
    fn build_rejects_bad_nodes() {
        let z = [c(0.0, 0.0)];
        let t = vec![vec![c(0.1, 0.0)], vec![c(0.2, 0.0)]];
        assert!(matches!(
            build_interpolating_disc(&z, &[c(0.3, 0.0), c(0.3, 0.0)], &t, &[]),
            Err(Error::RepeatedNodes(_))
        ));
        assert!(matches!(
            build_interpolating_disc(&z, &[c(0.0, 0.0)], &t[..1], &[]),
            Err(Error::RepeatedNodes(_))
        ));
        assert!(matches!(
            build_interpolating_disc(&z, &[c(0.3, 0.0)], &t, &[]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let constant = AnalyticDisc::constant(&[c(0.2, 0.3), c(-0.1, 0.0)]);
        assert_eq!(
            eval_disc(&constant, c(0.5, 0.5)).unwrap(),
            vec![c(0.2, 0.3), c(-0.1, 0.0)]
        );
        let id = AnalyticDisc::polynomial(vec![Poly::identity()]).unwrap();
        assert_eq!(eval_disc(&id, c(0.3, 0.0)).unwrap(), vec![c(0.3, 0.0)]);
        let lift = AnalyticDisc::exp_lift(Poly::constant(c(-1.0, 0.0))).unwrap();
        let v = eval_disc(&lift, c(0.4, -0.4)).unwrap()[0];
        assert!((v - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert!((v.re - 0.367879).abs() < 1e-6);
        // The covering lift whose half-plane lift is the constant −1.
        let cover = AnalyticDisc::covering_lift(Poly::constant(c(0.0, 0.0))).unwrap();
        assert!((eval_disc(&cover, c(0.1, 0.0)).unwrap()[0] - v).norm() < 1e-15);
        assert!(eval_disc(&id, c(1.0, 0.1)).is_err());
    }

    #[test]
    fn degree_budget() {
        let disc =
            AnalyticDisc::polynomial(vec![Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)])]).unwrap();
        assert_eq!(disc.degree_budget(), 2);
        assert!(disc.clone().with_degree_budget(6).is_ok());
        assert!(disc.with_degree_budget(1).is_err());
    }

    fn sample_competitor() -> Competitor {
        let disc = AnalyticDisc::polynomial(vec![Poly::identity()]).unwrap();
        let cert = certify_disc_in_domain(&Domain::UnitDisc, &disc.rescale(0.95)).unwrap();
        Competitor::new(
            disc,
            vec![c(0.0, 0.0)],
            vec![
                Node {
                    lambda: c(0.5, 0.0),
                    pole_index: 0,
                },
                Node {
                    lambda: c(0.0, 0.8),
                    pole_index: 1,
                },
            ],
            cert,
        )
        .unwrap()
    }

    #[test]
    fn shrink_examples() {
        let comp = sample_competitor();
        assert_eq!(shrink_competitor(&comp, 1.0).unwrap(), comp);
        let shrunk = shrink_competitor(&comp, 0.9).unwrap();
        assert!((shrunk.nodes[0].lambda - c(0.5 / 0.9, 0.0)).norm() < 1e-15);
        assert!((shrunk.nodes[0].lambda.re - 0.5555555555555556).abs() < 1e-15);
        let poles = vec![vec![c(0.5, 0.0)], vec![c(0.0, 0.8)]];
        assert!(shrunk.interpolation_residual(&poles) < 1e-15);
        assert!(shrink_competitor(&comp, 0.8).is_err());
        assert!(shrink_competitor(&comp, 1.1).is_err());

        let constant = Competitor::new(
            AnalyticDisc::constant(&[c(0.3, 0.0)]),
            vec![c(0.3, 0.0)],
            vec![],
            comp.certificate,
        )
        .unwrap();
        let s = shrink_competitor(&constant, 0.5).unwrap();
        assert_eq!(eval_disc(&s.disc, c(0.9, 0.0)).unwrap(), vec![c(0.3, 0.0)]);
    }

    #[test]
    fn restrict_examples() {
        let comp = sample_competitor();
        assert_eq!(restrict_competitor(&comp, &[0, 1]).unwrap(), comp);
        let second = restrict_competitor(&comp, &[1]).unwrap();
        assert_eq!(
            second.nodes,
            vec![Node {
                lambda: c(0.0, 0.8),
                pole_index: 0
            }]
        );
        assert_eq!(restrict_competitor(&comp, &[]), Err(Error::EmptyPoleSet));
        assert!(restrict_competitor(&comp, &[2]).is_err());
        assert!(restrict_competitor(&comp, &[0, 0]).is_err());
    }

    #[test]
    fn competitor_rejects_wrong_base_point() {
        let disc = AnalyticDisc::polynomial(vec![Poly::identity()]).unwrap();
        let cert = certify_disc_in_domain(&Domain::UnitDisc, &disc.rescale(0.5)).unwrap();
        assert!(Competitor::new(disc, vec![c(0.1, 0.0)], vec![], cert).is_err());
    }
}
