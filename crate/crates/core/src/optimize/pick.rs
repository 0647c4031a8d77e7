//! Pick matrices for interpolation by holomorphic maps from a disc into the
//! closed unit disc or closed Euclidean ball.
//!
//! A holomorphic `f` on `|λ| < r` with `‖f‖₂ ≤ 1` and `f(x_i) = w_i` exists
//! if and only if the matrix
//!
//! ```text
//! P_ij = (1 − ⟨w_i, w_j⟩) / (1 − x_i x̄_j / r²)
//! ```
//!
//! is positive semidefinite. Feasibility shrinks as `r` grows, so the largest
//! feasible radius is found by bisection.

use num_complex::Complex64;

/// Relative pivot below which a Cholesky step counts as a failure.
const PIVOT_TOLERANCE: f64 = 1e-13;

/// Smallest Cholesky pivot of `P(r)` scaled to unit diagonal, or `None` if
/// some `|x_i| ≥ r`. Nonnegative up to rounding exactly when `P(r)` is
/// positive semidefinite; a value outside the closed ball gives the negative
/// diagonal entry instead.
pub fn pick_pivot(points: &[Complex64], values: &[&[Complex64]], r: f64) -> Option<f64> {
    let n = points.len();
    let r2 = r * r;
    if points.iter().any(|x| !(x.norm_sqr() < r2)) {
        return None;
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let inner: Complex64 = values[i].iter().zip(values[j]).map(|(a, b)| a * b.conj()).sum();
            let entry = (Complex64::new(1.0, 0.0) - inner)
                / (Complex64::new(1.0, 0.0) - points[i] * points[j].conj() / r2);
            a[i * n + j] = entry;
            a[j * n + i] = entry.conj();
        }
    }
    let diagonal: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    if let Some(&worst) = diagonal
        .iter()
        .filter(|d| !(**d > 0.0))
        .min_by(|a, b| a.total_cmp(b))
    {
        return Some(worst.min(-f64::MIN_POSITIVE));
    }
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] /= (diagonal[i] * diagonal[j]).sqrt();
        }
    }
    let mut worst = f64::INFINITY;
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        worst = worst.min(d);
        if d <= PIVOT_TOLERANCE {
            return Some(worst);
        }
        let root = d.sqrt();
        a[j * n + j] = Complex64::new(root, 0.0);
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / root;
        }
    }
    Some(worst)
}

fn feasible(points: &[Complex64], values: &[&[Complex64]], r: f64) -> bool {
    pick_pivot(points, values, r).is_some_and(|p| p > PIVOT_TOLERANCE)
}

/// Largest `r ∈ [lo, cap]` with `P(r)` positive definite, to relative
/// accuracy `tolerance`. `None` if already `P(lo)` is not.
pub fn pick_radius(
    points: &[Complex64],
    values: &[&[Complex64]],
    lo: f64,
    cap: f64,
    tolerance: f64,
) -> Option<f64> {
    if !feasible(points, values, lo) {
        return None;
    }
    if feasible(points, values, cap) {
        return Some(cap);
    }
    let (mut a, mut b) = (lo.ln(), cap.ln());
    while b - a > tolerance {
        let mid = 0.5 * (a + b);
        if feasible(points, values, mid.exp()) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(a.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schwarz_lemma_radius() {
        // f(0) = 0, f(x) = w forces |x|/r ≥ |w|, so r* = |x|/|w|.
        let points = [c(0.0, 0.0), c(0.3, 0.1)];
        let v0 = [c(0.0, 0.0)];
        let v1 = [c(0.5, 0.0)];
        let r = pick_radius(&points, &[&v0, &v1], 0.3163, 4.0, 1e-12).unwrap();
        assert!((r - points[1].norm() / 0.5).abs() < 1e-9, "{r}");
    }

    #[test]
    fn mobius_radius() {
        // The automorphism with f(0) = z sends x to w iff |x|/r equals the
        // pseudo-hyperbolic distance of z and w.
        let z = c(0.2, -0.3);
        let w = c(-0.4, 0.5);
        let rho = ((w - z) / (Complex64::new(1.0, 0.0) - z.conj() * w)).norm();
        let x = c(0.0, 0.45);
        let r = pick_radius(&[c(0.0, 0.0), x], &[&[z], &[w]], 0.4501, 4.0, 1e-12).unwrap();
        assert!((r - 0.45 / rho).abs() < 1e-8, "{r} vs {}", 0.45 / rho);
    }

    #[test]
    fn ball_values_use_the_euclidean_norm() {
        // f(0) = 0, f(x) = (a, b): r* = |x| / ‖(a, b)‖.
        let x = c(0.25, 0.0);
        let v0 = [c(0.0, 0.0), c(0.0, 0.0)];
        let v1 = [c(0.3, 0.0), c(0.0, 0.4)];
        let r = pick_radius(&[c(0.0, 0.0), x], &[&v0, &v1], 0.2501, 4.0, 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_at_the_nodes() {
        let points = [c(0.0, 0.0), c(0.1, 0.0)];
        // Needs |x|/r ≥ 0.9999, impossible once r exceeds 0.10001.
        assert!(pick_radius(&points, &[&[c(0.0, 0.0)], &[c(0.9999, 0.0)]], 0.1001, 4.0, 1e-9).is_none());
    }
}
