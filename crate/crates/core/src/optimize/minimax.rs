//! Complex Chebyshev approximation on the unit circle by Lawson's iteratively
//! reweighted least squares.
//!
//! Given samples `u_i` (the `M`-th roots of unity), a common multiplier
//! `ω_i` and base values `b_{c,i}` for each component `c` of a block, find
//! polynomials `Q_c` of degree `< q` minimizing
//!
//! ```text
//! max_i ‖(b_{c,i} + ω_i Q_c(u_i))_c‖₂
//! ```
//!
//! Because `|u_i| = 1`, the weighted normal matrix is Hermitian Toeplitz
//! and shared by every component, so each sweep costs `O(Mq + q³)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The `M`-th roots of unity with `O(1)` powers.
#[derive(Clone, Debug)]
pub struct CircleGrid {
    points: Vec<Complex64>,
}

impl CircleGrid {
    pub fn new(m: usize) -> Self {
        assert!(m >= 4, "grid needs at least four points");
        Self {
            points: (0..m)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / m as f64))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// `u_i^d`.
    #[inline]
    pub fn power(&self, i: usize, d: usize) -> Complex64 {
        self.points[(i * d) % self.points.len()]
    }
}

pub struct BlockMinimax<'a> {
    pub grid: &'a CircleGrid,
    pub omega: &'a [Complex64],
    pub base: &'a [Vec<Complex64>],
    pub free: usize,
}

#[derive(Clone, Debug)]
pub struct MinimaxSolution {
    /// Coefficients of `Q_c`, ascending, one list per component.
    pub coeffs: Vec<Vec<Complex64>>,
    /// Achieved maximum of the block norm over the samples.
    pub max_error: f64,
}

impl BlockMinimax<'_> {
    fn residual_norms(&self, coeffs: &[Vec<Complex64>], out: &mut [f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, (&u, &w)) in self.grid.points().iter().zip(self.omega).enumerate() {
            let mut sq = 0.0;
            for (c, base) in self.base.iter().enumerate() {
                let q = coeffs[c].iter().rev().fold(ZERO, |acc, &a| acc * u + a);
                sq += (base[i] + w * q).norm_sqr();
            }
            out[i] = sq.sqrt();
            worst = worst.max(out[i]);
        }
        worst
    }

    /// Runs up to `iterations` Lawson sweeps from `weights` (reset to uniform
    /// when its length does not match the grid) and returns the best iterate.
    /// `weights` is left at the final reweighting for warm starts.
    pub fn solve(&self, weights: &mut Vec<f64>, iterations: usize) -> MinimaxSolution {
        let m = self.grid.len();
        let q = self.free;
        let mut errors = vec![0.0; m];
        let mut coeffs = vec![Vec::new(); self.base.len()];
        if q == 0 {
            let max_error = self.residual_norms(&coeffs, &mut errors);
            return MinimaxSolution { coeffs, max_error };
        }
        if weights.len() != m || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            *weights = vec![1.0 / m as f64; m];
        }
        coeffs.iter_mut().for_each(|c| *c = vec![ZERO; q]);
        let mut best = MinimaxSolution {
            max_error: self.residual_norms(&coeffs, &mut errors),
            coeffs: coeffs.clone(),
        };

        let conj_omega: Vec<Complex64> = self.omega.iter().map(|w| w.conj()).collect();
        let mut toeplitz = vec![ZERO; q];
        let mut gram = vec![ZERO; q * q];
        let mut rhs = vec![ZERO; q];
        for _ in 0..iterations {
            toeplitz.iter_mut().for_each(|t| *t = ZERO);
            for i in 0..m {
                let v = weights[i] * self.omega[i].norm_sqr();
                if v == 0.0 {
                    continue;
                }
                for (d, t) in toeplitz.iter_mut().enumerate() {
                    *t += self.grid.power(i, d) * v;
                }
            }
            for k in 0..q {
                for l in 0..q {
                    gram[k * q + l] = if l >= k {
                        toeplitz[l - k]
                    } else {
                        toeplitz[k - l].conj()
                    };
                }
            }
            let ridge = 1e-13 * toeplitz[0].re.max(f64::MIN_POSITIVE);
            for k in 0..q {
                gram[k * q + k] += ridge;
            }
            let Some(chol) = cholesky(&gram, q) else {
                break;
            };
            for (c, base) in self.base.iter().enumerate() {
                rhs.iter_mut().for_each(|r| *r = ZERO);
                for i in 0..m {
                    if weights[i] == 0.0 {
                        continue;
                    }
                    let a = -(conj_omega[i] * base[i]) * weights[i];
                    for (k, r) in rhs.iter_mut().enumerate() {
                        *r += a * self.grid.power(i, k).conj();
                    }
                }
                coeffs[c] = cholesky_solve(&chol, q, &rhs);
            }
            let max_error = self.residual_norms(&coeffs, &mut errors);
            if max_error < best.max_error {
                best.max_error = max_error;
                best.coeffs.clone_from(&coeffs);
            }
            let mut total = 0.0;
            for (w, e) in weights.iter_mut().zip(&errors) {
                *w *= e;
                total += *w;
            }
            if !(total > 0.0) || !total.is_finite() {
                *weights = vec![1.0 / m as f64; m];
                break;
            }
            weights.iter_mut().for_each(|w| *w /= total);
        }
        best
    }
}

/// Lower-triangular `L` with `A = L Lᴴ`, row-major; `None` if `A` is not
/// numerically positive definite.
fn cholesky(a: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut l = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k].conj();
            }
            if i == j {
                if !(sum.re > 0.0) || !sum.re.is_finite() {
                    return None;
                }
                l[i * n + i] = Complex64::new(sum.re.sqrt(), 0.0);
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[Complex64], n: usize, b: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![ZERO; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[k * n + i].conj() * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_solves_hermitian_system() {
        let a = vec![c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)];
        let l = cholesky(&a, 2).unwrap();
        let b = vec![c(1.0, 2.0), c(-1.0, 0.5)];
        let x = cholesky_solve(&l, 2, &b);
        let ax0 = a[0] * x[0] + a[1] * x[1];
        let ax1 = a[2] * x[0] + a[3] * x[1];
        assert!((ax0 - b[0]).norm() < 1e-14);
        assert!((ax1 - b[1]).norm() < 1e-14);
    }

    #[test]
    fn exact_cancellation_is_found() {
        // b = λ³ − 0.5λ², ω = λ², Q = −λ + 0.5 cancels it exactly.
        let grid = CircleGrid::new(64);
        let omega: Vec<_> = grid.points().iter().map(|u| u * u).collect();
        let base: Vec<_> = grid.points().iter().map(|u| u * u * u - u * u * 0.5).collect();
        let problem = BlockMinimax {
            grid: &grid,
            omega: &omega,
            base: std::slice::from_ref(&base),
            free: 3,
        };
        let mut w = Vec::new();
        let sol = problem.solve(&mut w, 5);
        assert!(sol.max_error < 1e-12, "{}", sol.max_error);
        assert!((sol.coeffs[0][0] - c(0.5, 0.0)).norm() < 1e-10);
        assert!((sol.coeffs[0][1] - c(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn approaches_known_minimax_value() {
        // min over constants a of max |1 + λ·a| on the circle is 1 (a = 0),
        // while with ω = λ − 2 the constant 1 + (λ − 2)a can be reduced below
        // 1: with a = 1/2 the error is |λ|/2 = 1/2 on the circle.
        let grid = CircleGrid::new(128);
        let omega: Vec<_> = grid.points().iter().map(|u| u - c(2.0, 0.0)).collect();
        let base = vec![c(1.0, 0.0); grid.len()];
        let problem = BlockMinimax {
            grid: &grid,
            omega: &omega,
            base: std::slice::from_ref(&base),
            free: 1,
        };
        let mut w = Vec::new();
        let sol = problem.solve(&mut w, 200);
        assert!((sol.max_error - 0.5).abs() < 1e-6, "{}", sol.max_error);
    }

    #[test]
    fn no_free_coefficients_reports_base_norm() {
        let grid = CircleGrid::new(16);
        let omega = vec![c(1.0, 0.0); 16];
        let base: Vec<_> = grid.points().iter().map(|u| u * 0.7).collect();
        let problem = BlockMinimax {
            grid: &grid,
            omega: &omega,
            base: std::slice::from_ref(&base),
            free: 0,
        };
        let sol = problem.solve(&mut Vec::new(), 10);
        assert!((sol.max_error - 0.7).abs() < 1e-15);
    }
}
