//! Scalar Nevanlinna–Pick interpolation on the unit disc by the Schur
//! algorithm.
//!
//! With `M_a(t) = (t − a)/(1 − āt)`, a solution `f` of `f(t_i) = w_i` is
//! peeled one node at a time:
//!
//! ```text
//! f(t) = (γ + M_{t_0}(t) g(t)) / (1 + γ̄ M_{t_0}(t) g(t)),    γ = w_0,
//! ```
//!
//! where `g` interpolates the transformed values at the remaining nodes. The
//! recursion ends with a constant, so `f` is a rational inner-like function of
//! degree at most the number of nodes minus one.

use num_complex::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Schur parameters at or beyond this modulus end the recursion with a
/// unimodular constant.
const DEGENERATE: f64 = 1.0 - 1e-12;

fn mobius(a: Complex64, t: Complex64) -> Complex64 {
    (t - a) / (ONE - a.conj() * t)
}

#[derive(Clone, Debug)]
pub struct SchurInterpolant {
    /// `(node, parameter)` pairs of the recursion, outermost first.
    steps: Vec<(Complex64, Complex64)>,
    tail: Complex64,
}

impl SchurInterpolant {
    /// `None` if some value lies outside the closed disc or the data are not
    /// interpolable by a map into the closed disc.
    pub fn new(points: &[Complex64], values: &[Complex64]) -> Option<Self> {
        assert_eq!(points.len(), values.len());
        if points.is_empty() || points.iter().any(|t| !(t.norm() < 1.0)) {
            return None;
        }
        let mut points = points.to_vec();
        let mut values = values.to_vec();
        let mut steps = Vec::with_capacity(points.len());
        loop {
            let gamma = values[0];
            let modulus = gamma.norm();
            if !(modulus <= 1.0 + 1e-9) {
                return None;
            }
            if modulus >= DEGENERATE || points.len() == 1 {
                let tail = if modulus >= DEGENERATE {
                    gamma / modulus
                } else {
                    gamma
                };
                return Some(Self { steps, tail });
            }
            let a = points[0];
            let mut next_points = Vec::with_capacity(points.len() - 1);
            let mut next_values = Vec::with_capacity(points.len() - 1);
            for (&t, &w) in points.iter().zip(&values).skip(1) {
                let v = (w - gamma) / ((ONE - gamma.conj() * w) * mobius(a, t));
                if !v.is_finite() {
                    return None;
                }
                next_points.push(t);
                next_values.push(v);
            }
            steps.push((a, gamma));
            points = next_points;
            values = next_values;
        }
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.steps.iter().rev().fold(self.tail, |g, &(a, gamma)| {
            let mg = mobius(a, t) * g;
            (gamma + mg) / (ONE + gamma.conj() * mg)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn interpolates_and_stays_in_the_disc() {
        // Values of g(t) = 0.3t² + 0.2t − 0.1, which has |g| ≤ 0.6 on the disc.
        let points = [c(0.0, 0.0), c(0.3, 0.2), c(-0.4, 0.1), c(0.1, -0.6)];
        let values = points.map(|t| t * t * 0.3 + t * 0.2 - 0.1);
        let f = SchurInterpolant::new(&points, &values).unwrap();
        for (&t, &w) in points.iter().zip(&values) {
            assert!((f.eval(t) - w).norm() < 1e-13);
        }
        for k in 0..256 {
            let u = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 256.0);
            assert!(f.eval(u).norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn extremal_data_give_an_automorphism() {
        // f(0) = 0 and f(1/2) = 1/2 force the identity.
        let f = SchurInterpolant::new(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let t = c(-0.3, 0.7);
        assert!((f.eval(t) - t).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_interpolable_data() {
        // Schwarz's lemma forbids f(0) = 0, f(0.1) = 0.5.
        assert!(SchurInterpolant::new(&[c(0.0, 0.0), c(0.1, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)]).is_none());
    }
}
