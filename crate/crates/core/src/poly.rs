//! Dense complex polynomials in the monomial basis.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A polynomial `Σ c_k λ^k` with coefficients stored in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `λ ↦ λ`.
    pub fn identity() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// Monic polynomial `∏ (λ - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![ONE];
        for &r in roots {
            coeffs.push(ZERO);
            for k in (1..coeffs.len()).rev() {
                let prev = coeffs[k - 1];
                coeffs[k] = prev - r * coeffs[k];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == ZERO {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(ZERO);
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// The polynomial `λ ↦ p(sλ)`.
    pub fn rescale_argument(&self, s: f64) -> Self {
        let mut power = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * power;
                power *= s;
                out
            })
            .collect();
        Self::new(coeffs)
    }

    /// `Σ_k k^order |c_k|`, which bounds the `order`-th angular derivative
    /// of `θ ↦ p(e^{iθ})` (order 0 bounds `p` itself on the closed disc).
    pub fn coefficient_moment(&self, order: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (k as f64).powi(order as i32) * c.norm())
            .sum()
    }

    /// Interpolating polynomial of degree `< xs.len()` through `(xs[i], ys[i])`,
    /// built from Newton divided differences.
    pub fn lagrange(xs: &[Complex64], ys: &[Complex64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::InvalidArgument(
                "interpolation needs at least one node".into(),
            ));
        }
        let n = xs.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if xs[i] == xs[j] {
                    return Err(Error::RepeatedNodes(format!(
                        "interpolation nodes {i} and {j} coincide"
                    )));
                }
            }
        }
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
            }
        }
        // Newton form → monomial form, innermost term first.
        let mut acc = Poly::constant(dd[n - 1]);
        for i in (0..n - 1).rev() {
            acc = &acc * &Poly::new(vec![-xs[i], ONE]);
            acc.coeffs[0] += dd[i];
        }
        acc.trim();
        Ok(acc)
    }

    /// All complex roots, by Aberth–Ehrlich simultaneous iteration.
    ///
    /// Trailing coefficients below `1e-14` relative to the largest are
    /// treated as zero. The zero polynomial and constants have no roots.
    pub fn roots(&self) -> Vec<Complex64> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Vec::new();
        }
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-14 * scale {
            coeffs.pop();
        }
        let n = coeffs.len() - 1;
        if n == 0 {
            return Vec::new();
        }
        let lead = coeffs[n];
        let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
        // Initial guesses on a circle of radius given by the geometric mean of
        // the root moduli, rotated off the real axis.
        let radius = monic[0].norm().powf(1.0 / n as f64).max(1e-3);
        let p = Poly { coeffs: monic };
        let dp = p.derivative();
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
                Complex64::from_polar(radius, theta)
            })
            .collect();

        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for k in 0..n {
                let pk = p.eval(z[k]);
                if pk == ZERO {
                    continue;
                }
                let ratio = pk / dp.eval(z[k]);
                let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| ONE / (z[k] - z[j])).sum();
                let step = ratio / (ONE - ratio * repulsion);
                if step.is_finite() {
                    z[k] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
                } else {
                    z[k] += Complex64::new(1e-8, 1e-8);
                    max_step = f64::INFINITY;
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        z
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(ZERO) + rhs.coeffs.get(k).copied().unwrap_or(ZERO))
            .collect();
        Poly::new(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-ONE)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }
}
