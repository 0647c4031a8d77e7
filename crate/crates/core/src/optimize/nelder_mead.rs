//! Nelder–Mead simplex search with dimension-adaptive coefficients.

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop once the spread of simplex values and the simplex diameter both
    /// fall below these.
    pub f_tolerance: f64,
    pub x_tolerance: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            initial_step: 0.2,
            f_tolerance: 1e-12,
            x_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Minimizes `f` starting from `x0`.
///
/// Reflection, expansion, contraction and shrink coefficients follow Gao and
/// Han's adaptive choice, which keeps the simplex from collapsing in higher
/// dimensions. Non-finite values are treated as `+∞`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], options: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0);
        return NelderMeadResult {
            x: Vec::new(),
            value,
            iterations: 0,
            evaluations: 1,
        };
    }

    let nf = n as f64;
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / nf;
    let gamma = 0.75 - 1.0 / (2.0 * nf);
    let delta = 1.0 - 1.0 / nf;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += options.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    while iterations < options.max_iterations {
        iterations += 1;

        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let sorted_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = sorted_simplex;
        values = sorted_values;

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= options.f_tolerance && diameter <= options.x_tolerance {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }

        let worst = simplex[n].clone();
        for i in 0..n {
            trial[i] = centroid[i] + alpha * (centroid[i] - worst[i]);
        }
        let f_reflect = eval(&trial);

        if f_reflect < values[0] {
            for i in 0..n {
                trial2[i] = centroid[i] + beta * (trial[i] - centroid[i]);
            }
            let f_expand = eval(&trial2);
            if f_expand < f_reflect {
                simplex[n].copy_from_slice(&trial2);
                values[n] = f_expand;
            } else {
                simplex[n].copy_from_slice(&trial);
                values[n] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[n - 1] {
            simplex[n].copy_from_slice(&trial);
            values[n] = f_reflect;
            continue;
        }

        let outside = f_reflect < values[n];
        for i in 0..n {
            trial2[i] = if outside {
                centroid[i] + gamma * (trial[i] - centroid[i])
            } else {
                centroid[i] - gamma * (centroid[i] - worst[i])
            };
        }
        let f_contract = eval(&trial2);
        let accept = if outside {
            f_contract <= f_reflect
        } else {
            f_contract < values[n]
        };
        if accept {
            simplex[n].copy_from_slice(&trial2);
            values[n] = f_contract;
            continue;
        }

        let best = simplex[0].clone();
        for j in 1..=n {
            for i in 0..n {
                simplex[j][i] = best[i] + delta * (simplex[j][i] - best[i]);
            }
            values[j] = eval(&simplex[j]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("non-empty simplex");
    NelderMeadResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            max_iterations: 5000,
            initial_step: 0.5,
            ..Default::default()
        };
        let r = nelder_mead(rosen, &[-1.2, 1.0], &opts);
        assert!(r.value < 1e-10, "value {}", r.value);
        assert!((r.x[0] - 1.0).abs() < 1e-4);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn minimizes_quadratic_in_ten_dimensions() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * (v - 0.5).powi(2))
                .sum()
        };
        let r = nelder_mead(
            f,
            &[0.0; 10],
            &NelderMeadOptions {
                max_iterations: 20000,
                ..Default::default()
            },
        );
        assert!(r.value < 1e-8, "value {}", r.value);
    }

    #[test]
    fn treats_nan_as_infinite() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 1.0).powi(2)
            }
        };
        let r = nelder_mead(f, &[0.5], &NelderMeadOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn respects_iteration_cap() {
        let f = |x: &[f64]| x[0].powi(2) + x[1].powi(2);
        let r = nelder_mead(
            f,
            &[5.0, 5.0],
            &NelderMeadOptions {
                max_iterations: 3,
                ..Default::default()
            },
        );
        assert_eq!(r.iterations, 3);
    }
}
