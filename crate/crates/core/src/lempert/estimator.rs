//! Search for certified competitors.
//!
//! Only the nodes `λ_j` are searched, by the simplex method. For given nodes
//! the largest radius `r*` of a disc `|λ| < r*` carrying a holomorphic map
//! into the closed domain with `φ(0) = z` and `φ(λ_j) = a_j` is exact for
//! products of discs and balls: it is where the Pick matrix of some factor
//! stops being positive semidefinite. The disc `λ ↦ φ(r*λ)` has nodes
//! `λ_j / r*`, so the simplex minimizes `Σ p_j log(|λ_j| / r*)`.
//!
//! The best node sets are then turned into polynomial discs: Taylor
//! polynomials of the Schur interpolants when every factor is a disc,
//! minimax fits of `φ = L + λ∏(λ − λ_j)·Q` otherwise, with `L` the
//! interpolant of the constraints. The radius is then lowered until the disc
//! certifies.
//!
//! On the punctured disc the same search runs for the inner map `u` of a
//! covering-lift disc `exp ∘ cayley ∘ u`, one branch assignment at a time.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blaschke::NODE_SEPARATION_FLOOR;
use crate::discs::{
    cayley, check_nodes, lift_point, node_polynomial, shrink_competitor, AnalyticDisc, Competitor, Node,
    Representation, INTERPOLATION_TOLERANCE,
};
use crate::domains::{certify_disc_in_domain_with, Block, BlockKind, Domain};
use crate::error::{Error, Result};
use crate::optimize::{
    nelder_mead, pick_pivot, pick_radius, BlockMinimax, CircleGrid, NelderMeadOptions, SchurInterpolant,
};
use crate::poly::Poly;

use super::{objective, Estimate, OptimizerConfig, PoleSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Node moduli stay in `(MIN_MODULUS, MAX_MODULUS)`.
const MIN_MODULUS: f64 = 1e-6;
const MAX_MODULUS: f64 = 1.0 - 1e-6;

/// Largest radius tried by the self-scaling search.
const RADIUS_CAP: f64 = 4.0;

/// Objective value of node sets that violate the separation floor.
const SEPARATION_PENALTY: f64 = 1e3;

/// Alternations of minimax fit and radius update for a candidate's disc.
const FIT_ROUNDS: usize = 4;

/// Relative radius shortfall at which the degree of the fit stops growing.
const FIT_GAP: f64 = 1e-4;

/// Relative distance below the exact radius at which interpolants are built.
const SCHUR_BACKOFF: f64 = 1e-7;

/// Coefficient mass dropped when truncating an interpolant's Taylor series.
const TRUNCATION_TOLERANCE: f64 = 1e-14;

/// Competitors certified per search before the best one is kept.
/// Best runs continued after the restarts.
const POLISHED_RUNS: usize = 3;
/// Their iteration budget, in multiples of `max_iterations`.
const POLISH_BUDGET: usize = 3;
const CERTIFIED_CANDIDATES: usize = 3;

/// Candidates tried per search, certified or not.
const CERTIFICATION_ATTEMPTS: usize = 8;

fn squash(x: f64, y: f64) -> Complex64 {
    let rho = x.hypot(y);
    let modulus = MIN_MODULUS + (MAX_MODULUS - MIN_MODULUS) * rho.tanh();
    if rho == 0.0 {
        Complex64::new(modulus, 0.0)
    } else {
        Complex64::new(x, y) * (modulus / rho)
    }
}

fn unsquash(lambda: Complex64) -> [f64; 2] {
    let modulus = lambda
        .norm()
        .clamp(MIN_MODULUS * (1.0 + 1e-9), MAX_MODULUS * (1.0 - 1e-12));
    let rho = ((modulus - MIN_MODULUS) / (MAX_MODULUS - MIN_MODULUS)).atanh();
    let dir = if lambda.norm() > 0.0 {
        lambda / lambda.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    [rho * dir.re, rho * dir.im]
}

fn nodes_from(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|p| squash(p[0], p[1])).collect()
}

fn params_from(nodes: &[Complex64]) -> Vec<f64> {
    nodes.iter().flat_map(|&n| unsquash(n)).collect()
}

#[derive(Clone, Debug, PartialEq)]
enum Mode {
    Polynomial,
    Covering,
}

/// The search problem for one branch assignment: constraints in the
/// coordinates where the disc is polynomial.
struct Problem<'a> {
    domain: &'a Domain,
    spec: &'a PoleSpec,
    mode: Mode,
    blocks: Vec<Block>,
    /// `φ(0)`, lifted for covering discs.
    base: Vec<Complex64>,
    targets: Vec<Vec<Complex64>>,
    branches: Option<Vec<i64>>,
}

impl<'a> Problem<'a> {
    fn polynomial(domain: &'a Domain, spec: &'a PoleSpec, z: &[Complex64]) -> Self {
        Self {
            domain,
            spec,
            mode: Mode::Polynomial,
            blocks: domain.blocks(),
            base: z.to_vec(),
            targets: spec.points(),
            branches: None,
        }
    }

    fn covering(domain: &'a Domain, spec: &'a PoleSpec, z: Complex64, branches: Vec<i64>) -> Result<Self> {
        let targets = spec
            .poles()
            .iter()
            .zip(&branches)
            .map(|(p, &k)| lift_point(p.point[0], k).map(|l| vec![l]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            spec,
            mode: Mode::Covering,
            blocks: vec![Block {
                kind: BlockKind::Disc,
                components: 0..1,
            }],
            base: vec![lift_point(z, 0)?],
            targets,
            branches: Some(branches),
        })
    }

    fn weights(&self) -> Vec<f64> {
        self.spec.weights()
    }
}

/// A competitor before scaling: the disc `φ` in the node coordinates and the
/// radius `r` at which `λ ↦ φ(rλ)` still fits on the samples.
struct Fit {
    nodes: Vec<Complex64>,
    components: Vec<Poly>,
    radius: f64,
}

/// `L_k + ω·Q_k` with `Q_k(λ) = scaled_k(λ / r)`.
fn assemble(interp: &[Poly], omega: &Poly, scaled_free: &[Vec<Complex64>], r: f64) -> Vec<Poly> {
    interp
        .iter()
        .zip(scaled_free)
        .map(|(l, q)| {
            if q.is_empty() {
                return l.clone();
            }
            let q = Poly::new(q.clone()).rescale_argument(1.0 / r);
            l + &(omega * &q)
        })
        .collect()
}

struct Evaluator<'p, 'a> {
    problem: &'p Problem<'a>,
    grid: CircleGrid,
    /// Free coefficients of `Q` per component.
    free: usize,
    /// Lawson sweeps per fit.
    sweeps: usize,
    /// Fit, radius update rounds per evaluation.
    rounds: usize,
    lawson_weights: Vec<Vec<f64>>,
    radius_guess: f64,
    // scratch
    omega_values: Vec<Complex64>,
    base_values: Vec<Vec<Complex64>>,
}

impl<'p, 'a> Evaluator<'p, 'a> {
    fn new(problem: &'p Problem<'a>, free: usize, samples: usize, sweeps: usize, rounds: usize) -> Self {
        let grid = CircleGrid::new(samples.max(8));
        let m = grid.len();
        Self {
            problem,
            free,
            sweeps,
            rounds: rounds.max(1),
            lawson_weights: vec![Vec::new(); problem.blocks.len()],
            radius_guess: 1.0,
            omega_values: vec![ZERO; m],
            base_values: vec![vec![ZERO; m]; problem.base.len()],
            grid,
        }
    }

    fn interpolate(&self, nodes: &[Complex64]) -> Option<(Vec<Poly>, Poly)> {
        if check_nodes(nodes, NODE_SEPARATION_FLOOR).is_err() {
            return None;
        }
        let mut xs = Vec::with_capacity(nodes.len() + 1);
        xs.push(ZERO);
        xs.extend_from_slice(nodes);
        let interp = (0..self.problem.base.len())
            .map(|k| {
                let mut ys = Vec::with_capacity(xs.len());
                ys.push(self.problem.base[k]);
                ys.extend(self.problem.targets.iter().map(|t| t[k]));
                Poly::lagrange(&xs, &ys).ok()
            })
            .collect::<Option<Vec<_>>>()?;
        if interp.iter().any(|p| p.coeffs().iter().any(|c| !c.is_finite())) {
            return None;
        }
        Some((interp, node_polynomial(nodes)))
    }

    /// Minimax fit of the free polynomials on the circle of radius `r`, as
    /// coefficients of `u ↦ Q(r·u)`.
    fn fit_at(&mut self, interp: &[Poly], omega: &Poly, r: f64) -> Vec<Vec<Complex64>> {
        for (i, u) in self.grid.points().iter().enumerate() {
            let x = u * r;
            self.omega_values[i] = omega.eval(x);
            for (k, l) in interp.iter().enumerate() {
                self.base_values[k][i] = l.eval(x);
            }
        }
        let mut coeffs = vec![Vec::new(); interp.len()];
        for (b, block) in self.problem.blocks.iter().enumerate() {
            let range = block.components.clone();
            let problem = BlockMinimax {
                grid: &self.grid,
                omega: &self.omega_values,
                base: &self.base_values[range.clone()],
                free: self.free,
            };
            let solution = problem.solve(&mut self.lawson_weights[b], self.sweeps);
            for (k, c) in range.zip(solution.coeffs) {
                coeffs[k] = c;
            }
        }
        coeffs
    }

    /// Largest sampled gauge of `components` on the circle of radius `r`.
    fn gauge(&self, components: &[Poly], r: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for u in self.grid.points() {
            let x = u * r;
            for block in &self.problem.blocks {
                let g = match block.kind {
                    BlockKind::Ball => components[block.components.clone()]
                        .iter()
                        .map(|p| p.eval(x).norm_sqr())
                        .sum::<f64>()
                        .sqrt(),
                    _ => components[block.components.start].eval(x).norm(),
                };
                worst = worst.max(g);
            }
        }
        worst
    }

    /// Largest radius in `(node_radius, RADIUS_CAP]` at which the sampled
    /// gauge of `components` stays below one; `Err(excess)` if it already
    /// fails at `node_radius`. The log gauge is convex in `log r`, so a
    /// safeguarded false position converges quickly.
    fn largest_radius(
        &self,
        components: &[Poly],
        node_radius: f64,
        guess: f64,
    ) -> std::result::Result<f64, f64> {
        let f = |t: f64| self.gauge(components, t.exp()).max(f64::MIN_POSITIVE).ln();
        let lo_bound = node_radius.ln();
        let f_lo = f(lo_bound);
        if f_lo >= 0.0 {
            return Err(f_lo);
        }
        let mut a = lo_bound;
        let mut fa = f_lo;
        let mut b = guess.clamp(node_radius * 1.001, RADIUS_CAP).ln();
        let mut fb = f(b);
        if fb < 0.0 {
            let mut step = 0.02;
            loop {
                a = b;
                fa = fb;
                if b >= RADIUS_CAP.ln() {
                    return Ok(RADIUS_CAP);
                }
                b = (b + step).min(RADIUS_CAP.ln());
                step *= 2.0;
                fb = f(b);
                if fb >= 0.0 {
                    break;
                }
            }
        }
        let mut side = 0i8;
        for _ in 0..60 {
            if b - a < 1e-10 {
                break;
            }
            let mut t = (a * fb - b * fa) / (fb - fa);
            if !(t > a && t < b) {
                t = 0.5 * (a + b);
            }
            let ft = f(t);
            if ft < 0.0 {
                a = t;
                fa = ft;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = t;
                fb = ft;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Ok(a.exp())
    }

    /// Alternates minimax fits and radius updates. `Err(excess)` when the
    /// nodes admit no feasible radius; `None` for node sets below the
    /// separation floor.
    fn fit(&mut self, nodes: &[Complex64]) -> Option<std::result::Result<Fit, f64>> {
        let (interp, omega) = self.interpolate(nodes)?;
        let node_radius = nodes.iter().map(|n| n.norm()).fold(0.0, f64::max) * (1.0 + 1e-9);
        let mut radius = self.radius_guess.clamp(node_radius * 1.001, RADIUS_CAP);
        let mut outcome: std::result::Result<Fit, f64> = Err(f64::INFINITY);
        for _ in 0..self.rounds {
            let scaled_free = self.fit_at(&interp, &omega, radius);
            let components = assemble(&interp, &omega, &scaled_free, radius);
            match self.largest_radius(&components, node_radius, radius) {
                Ok(r) => {
                    let improved = match &outcome {
                        Ok(best) => r > best.radius,
                        Err(_) => true,
                    };
                    if improved {
                        outcome = Ok(Fit {
                            nodes: nodes.to_vec(),
                            components,
                            radius: r,
                        });
                    }
                    radius = r;
                }
                Err(excess) => {
                    if outcome.is_err() {
                        outcome = Err(excess);
                    }
                    // Try the fit closer to the nodes.
                    radius = (radius * node_radius).sqrt().max(node_radius * 1.001);
                }
            }
        }
        if let Ok(fit) = &outcome {
            self.radius_guess = fit.radius;
        }
        Some(outcome)
    }
}

/// Largest radius `r*` such that some holomorphic map on `|λ| < r*` meets the
/// constraints at the nodes and maps into the closure of the domain, block by
/// block. `Err(excess)` when no radius beyond the nodes works; `None` below
/// the separation floor.
fn pick_bound(problem: &Problem<'_>, nodes: &[Complex64]) -> Option<std::result::Result<f64, f64>> {
    check_nodes(nodes, NODE_SEPARATION_FLOOR).ok()?;
    let mut points = Vec::with_capacity(nodes.len() + 1);
    points.push(ZERO);
    points.extend_from_slice(nodes);
    let node_radius = nodes.iter().map(|n| n.norm()).fold(0.0, f64::max) * (1.0 + 1e-9);
    let mut radius = RADIUS_CAP;
    for block in &problem.blocks {
        let range = block.components.clone();
        let mut values: Vec<&[Complex64]> = Vec::with_capacity(points.len());
        values.push(&problem.base[range.clone()]);
        values.extend(problem.targets.iter().map(|t| &t[range.clone()]));
        match pick_radius(&points, &values, node_radius, RADIUS_CAP, 1e-10) {
            Some(r) => radius = radius.min(r),
            None => {
                let pivot = pick_pivot(&points, &values, node_radius).unwrap_or(-1.0);
                return Some(Err((-pivot).max(0.0)));
            }
        }
    }
    Some(Ok(radius))
}

fn pick_value(problem: &Problem<'_>, weights: &[f64], nodes: &[Complex64]) -> f64 {
    match pick_bound(problem, nodes) {
        None => SEPARATION_PENALTY,
        Some(Err(excess)) => 1.0 + excess,
        Some(Ok(r)) => nodes
            .iter()
            .zip(weights)
            .map(|(n, w)| w * (n.norm() / r).ln())
            .sum(),
    }
}

/// A simplex run's end point.
#[derive(Clone, Debug)]
struct RunResult {
    index: usize,
    problem: usize,
    nodes: Vec<Complex64>,
    value: f64,
    radius_guess: f64,
    feasible: bool,
    iterations: usize,
}

fn run_search(
    problem: &Problem<'_>,
    problem_index: usize,
    index: usize,
    start: Vec<f64>,
    max_iterations: usize,
) -> RunResult {
    let weights = problem.weights();
    let f = |x: &[f64]| pick_value(problem, &weights, &nodes_from(x));
    // The simplex stalls in the narrow valleys of the Pick radius; a fresh
    // simplex at the last point keeps it moving.
    let mut x = start;
    let mut value = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iterations {
        let options = NelderMeadOptions {
            max_iterations: max_iterations - iterations,
            initial_step: 0.2,
            f_tolerance: 1e-8,
            x_tolerance: 1e-6,
        };
        let result = nelder_mead(f, &x, &options);
        iterations += result.iterations.max(1);
        let improved = result.value < value - 1e-9;
        x = result.x;
        value = result.value;
        if !improved {
            break;
        }
    }
    let nodes = nodes_from(&x);
    let (radius_guess, feasible) = match pick_bound(problem, &nodes) {
        Some(Ok(r)) => (r, true),
        _ => (1.0, false),
    };
    RunResult {
        index,
        problem: problem_index,
        nodes,
        value,
        radius_guess,
        feasible,
        iterations,
    }
}

fn random_start(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let nodes: Vec<Complex64> = (0..m)
        .map(|_| {
            let modulus = rng.gen_range(0.2..0.95);
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(modulus, angle)
        })
        .collect();
    params_from(&nodes)
}

/// Nodes following the poles' arrangement in one block picked at random:
/// their images under the automorphism of the disc taking the base point to
/// the origin, or projections `⟨a_j − z, v⟩` on a random complex direction
/// `v` for a ball. Random rotation and scale, small jitter. Falls back to
/// random nodes when the nodes nearly collide.
fn projected_start(problem: &Problem<'_>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = problem.targets.len();
    let block = &problem.blocks[rng.gen_range(0..problem.blocks.len())];
    let range = block.components.clone();
    let images: Vec<Complex64> = match block.kind {
        BlockKind::Disc | BlockKind::Punctured => {
            let z = problem.base[range.start];
            problem
                .targets
                .iter()
                .map(|t| {
                    let a = t[range.start];
                    (a - z) / (Complex64::new(1.0, 0.0) - z.conj() * a)
                })
                .collect()
        }
        BlockKind::Ball => {
            let v: Vec<Complex64> = range
                .clone()
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            problem
                .targets
                .iter()
                .map(|t| {
                    t[range.clone()]
                        .iter()
                        .zip(&problem.base[range.clone()])
                        .zip(&v)
                        .map(|((a, z), v)| (a - z) * v.conj())
                        .sum()
                })
                .collect()
        }
    };
    let largest = images.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let rotation = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let scale = rng.gen_range(0.3..0.95) / largest;
    let nodes: Vec<Complex64> = images
        .iter()
        .map(|p| {
            let jitter = Complex64::new(rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02));
            p * rotation * scale + jitter * largest.min(1.0) * scale
        })
        .collect();
    if !(largest.is_finite() && largest > 0.0) || check_nodes(&nodes, 2.0 * NODE_SEPARATION_FLOOR).is_err() {
        return random_start(rng, m);
    }
    params_from(&nodes)
}

/// Even restarts follow the poles' arrangement, odd ones are uniform.
fn restart_start(problem: &Problem<'_>, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = restart_rng(seed, index as u64);
    let start = if index.is_multiple_of(2) {
        projected_start(problem, &mut rng)
    } else {
        random_start(&mut rng, problem.targets.len())
    };
    if let Some(nodes) = feasible_start(problem, &nodes_from(&start)) {
        return params_from(&nodes);
    }
    // Equal moduli and distinct angles spread the nodes hyperbolically once
    // normalized by the largest modulus, which makes the data interpolable.
    let m = problem.targets.len();
    let modulus = rng.gen_range(0.5..0.9);
    let offset = rng.gen_range(0.0..std::f64::consts::TAU);
    let nodes: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(modulus, offset + std::f64::consts::TAU * j as f64 / m as f64))
        .collect();
    params_from(&nodes)
}

/// Moves the node moduli toward their maximum until the Pick matrix at the
/// largest node is positive definite.
fn feasible_start(problem: &Problem<'_>, nodes: &[Complex64]) -> Option<Vec<Complex64>> {
    let largest = nodes.iter().map(|n| n.norm()).fold(0.0, f64::max);
    [0.0, 0.25, 0.5, 0.75, 0.9, 0.97, 1.0].iter().find_map(|&s| {
        let moved: Vec<Complex64> = nodes.iter().map(|&n| n * (largest / n.norm()).powf(s)).collect();
        matches!(pick_bound(problem, &moved), Some(Ok(_))).then_some(moved)
    })
}

fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The disc for a run's nodes: exact interpolants truncated to polynomials
/// when every block is a disc, minimax fits of `Q` otherwise. `None` when a
/// node lies on the exact radius, where no interior interpolant exists.
fn polynomial_fit(problem: &Problem<'_>, run: &RunResult, config: &OptimizerConfig) -> Option<Fit> {
    if problem.blocks.iter().all(|b| b.kind == BlockKind::Disc) {
        return schur_fit(problem, run, config);
    }
    minimax_fit(problem, run, config)
}

/// Each coordinate is the Taylor polynomial of the Schur interpolant on the
/// disc of radius `r*(1 − SCHUR_BACKOFF)`, corrected to interpolate exactly.
fn schur_fit(problem: &Problem<'_>, run: &RunResult, config: &OptimizerConfig) -> Option<Fit> {
    let radius = run.radius_guess * (1.0 - SCHUR_BACKOFF);
    let mut points = Vec::with_capacity(run.nodes.len() + 1);
    points.push(ZERO);
    points.extend_from_slice(&run.nodes);
    if points.iter().any(|x| !(x.norm() < radius)) {
        return None;
    }
    let scaled: Vec<Complex64> = points.iter().map(|x| x / radius).collect();
    let max_degree = run.nodes.len() + config.max_free_coefficients;
    let samples = (4 * (max_degree + 1)).next_power_of_two().max(1024);
    let grid = CircleGrid::new(samples);
    let mut truncated = Vec::with_capacity(problem.base.len());
    for k in 0..problem.base.len() {
        let mut values = Vec::with_capacity(points.len());
        values.push(problem.base[k]);
        values.extend(problem.targets.iter().map(|t| t[k]));
        let f = SchurInterpolant::new(&scaled, &values)?;
        let on_circle: Vec<Complex64> = grid.points().iter().map(|&u| f.eval(u)).collect();
        let mut coeffs: Vec<Complex64> = (0..=max_degree)
            .map(|n| {
                on_circle
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * grid.power(i, n).conj())
                    .sum::<Complex64>()
                    / samples as f64
            })
            .collect();
        let mut tail = 0.0;
        while coeffs.len() > points.len() {
            tail += coeffs.last().map_or(0.0, |c| c.norm());
            if tail > TRUNCATION_TOLERANCE {
                break;
            }
            coeffs.pop();
        }
        truncated.push((Poly::new(coeffs).rescale_argument(1.0 / radius), values));
    }

    let (components, nodes) = if let [(p, values)] = truncated.as_slice() {
        // One coordinate: fix the constant term and move each node to the
        // nearby exact preimage, which leaves the sup norm untouched.
        let mut coeffs = p.coeffs().to_vec();
        coeffs[0] = values[0];
        let p = Poly::new(coeffs);
        let dp = p.derivative();
        let mut nodes = Vec::with_capacity(run.nodes.len());
        for (&x, &w) in run.nodes.iter().zip(&values[1..]) {
            let y = polish_root(&p, &dp, w, x);
            if !((p.eval(y) - w).norm() < 1e-13 && (y - x).norm() < 0.1 * x.norm() && y.norm() < radius) {
                return None;
            }
            nodes.push(y);
        }
        check_nodes(&nodes, NODE_SEPARATION_FLOOR).ok()?;
        (vec![p], nodes)
    } else {
        let mut components = Vec::with_capacity(truncated.len());
        for (p, values) in &truncated {
            let residuals: Vec<Complex64> = points.iter().zip(values).map(|(&x, &w)| w - p.eval(x)).collect();
            components.push(p + &Poly::lagrange(&points, &residuals).ok()?);
        }
        (components, run.nodes.clone())
    };
    if components
        .iter()
        .any(|p| p.coeffs().iter().any(|c| !c.is_finite()))
    {
        return None;
    }
    Some(Fit {
        nodes,
        components,
        radius,
    })
}

/// Fits `Q` with `free_coefficients` terms, doubling up to
/// `max_free_coefficients` until the fitted radius is within `FIT_GAP` of the
/// exact radius from the search.
fn minimax_fit(problem: &Problem<'_>, run: &RunResult, config: &OptimizerConfig) -> Option<Fit> {
    let mut free = config.free_coefficients.min(config.max_free_coefficients);
    let mut best: Option<Fit> = None;
    loop {
        let samples = config.fit_samples.max(4 * (free + run.nodes.len() + 1));
        let mut evaluator = Evaluator::new(problem, free, samples, config.lawson_sweeps, FIT_ROUNDS);
        evaluator.radius_guess = run.radius_guess;
        if let Some(Ok(fit)) = evaluator.fit(&run.nodes) {
            if best.as_ref().is_none_or(|b| fit.radius > b.radius) {
                best = Some(fit);
            }
        }
        let close = best
            .as_ref()
            .is_some_and(|b| b.radius >= run.radius_guess * (1.0 - FIT_GAP));
        if close || free >= config.max_free_coefficients {
            return best;
        }
        free = (2 * free).max(1).min(config.max_free_coefficients);
    }
}

fn certify_run(problem: &Problem<'_>, run: &RunResult, config: &OptimizerConfig) -> Option<Competitor> {
    let fit = polynomial_fit(problem, run, config)?;
    let components = fit.components;
    let disc = match problem.mode {
        Mode::Polynomial => AnalyticDisc::polynomial(components).ok()?,
        Mode::Covering => AnalyticDisc::covering_lift(components.into_iter().next()?).ok()?,
    };

    let node_radius = fit.nodes.iter().map(|n| n.norm()).fold(0.0, f64::max);
    // High degrees need denser samples for a tight gap bound.
    let degree = disc
        .representation()
        .polynomials()
        .iter()
        .map(Poly::degree)
        .max()
        .unwrap_or(0);
    let samples = config.boundary_samples.max((16 * degree).next_power_of_two());
    let certify = |rho: f64| {
        certify_disc_in_domain_with(problem.domain, &disc.rescale(rho), samples, config.margin_floor)
            .ok()
            .filter(|c| c.certified)
    };
    let mut rho = fit.radius;
    let mut certificate = certify(rho);
    if certificate.is_none() {
        let mut lo = node_radius * (1.0 + 1e-9);
        let mut lo_cert = certify(lo)?;
        let mut hi = fit.radius;
        for _ in 0..50 {
            if hi / lo - 1.0 < 1e-12 {
                break;
            }
            let mid = (lo * hi).sqrt();
            match certify(mid) {
                Some(c) => {
                    lo = mid;
                    lo_cert = c;
                }
                None => hi = mid,
            }
        }
        rho = lo;
        certificate = Some(lo_cert);
    }
    let certificate = certificate?;

    let base_point = problem.spec_base_point();
    let nodes = fit
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &n)| Node {
            lambda: n / rho,
            pole_index: i,
        })
        .collect();
    let mut competitor = Competitor::new(disc.rescale(rho), base_point, nodes, certificate).ok()?;
    if let Some(branches) = &problem.branches {
        competitor = competitor.with_branches(branches.clone());
    }
    let competitor = shrink_competitor(&competitor, config.shrink).ok()?;
    (competitor.interpolation_residual(&problem.spec.points()) < INTERPOLATION_TOLERANCE)
        .then_some(competitor)
}

impl Problem<'_> {
    fn spec_base_point(&self) -> Vec<Complex64> {
        match self.mode {
            Mode::Polynomial => self.base.clone(),
            Mode::Covering => vec![cayley(self.base[0]).exp()],
        }
    }
}

/// Accepts a supplied competitor if it is certified, fits the domain and
/// meets this spec's constraints.
fn admissible_warm_start(domain: &Domain, spec: &PoleSpec, z: &[Complex64], c: &Competitor) -> bool {
    let representation_fits = match (domain, c.disc.representation()) {
        (Domain::PuncturedDisc, Representation::CoveringLift(_)) => c.branches.is_some(),
        (Domain::PuncturedDisc, Representation::ExpLift(_)) => false,
        (_, Representation::Polynomial(_)) => true,
        _ => false,
    };
    representation_fits
        && c.certificate.certified
        && c.disc.dimension() == domain.dimension()
        && c.nodes.len() == spec.len()
        && c.base_point.len() == z.len()
        && c.base_point
            .iter()
            .zip(z)
            .all(|(a, b)| (a - b).norm() <= INTERPOLATION_TOLERANCE)
        && c.max_node_modulus() < 1.0
        && objective(c, spec).is_ok()
        && c.interpolation_residual(&spec.points()) < INTERPOLATION_TOLERANCE
}

/// Branch assignments in increasing order of the lower bound
/// `∏_j m(ã_j^{(k_j)}, ž)^{p_j}`: no covering-lift competitor with those
/// branches does better, because its inner map is a disc competitor for the
/// lifted poles.
fn ranked_branches(spec: &PoleSpec, z: Complex64, bound: i64, limit: usize) -> Result<Vec<(f64, Vec<i64>)>> {
    let z_lift = lift_point(z, 0)?;
    let mut per_pole: Vec<Vec<(f64, i64)>> = Vec::with_capacity(spec.len());
    for pole in spec.poles() {
        let mut options = (-bound..=bound)
            .map(|k| {
                let l = lift_point(pole.point[0], k)?;
                let factor = (l - z_lift).norm() / (Complex64::new(1.0, 0.0) - l.conj() * z_lift).norm();
                Ok((pole.weight * factor.max(f64::MIN_POSITIVE).ln(), k))
            })
            .collect::<Result<Vec<_>>>()?;
        options.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.abs().cmp(&b.1.abs()))
                .then(a.1.cmp(&b.1))
        });
        per_pole.push(options);
    }

    #[derive(PartialEq)]
    struct Entry(f64, Vec<usize>);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
        }
    }
    let score = |idx: &[usize]| {
        idx.iter()
            .enumerate()
            .map(|(j, &i)| per_pole[j][i].0)
            .sum::<f64>()
    };
    let start = vec![0usize; spec.len()];
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    heap.push(Entry(score(&start), start.clone()));
    seen.insert(start);
    let mut out = Vec::new();
    while let Some(Entry(s, idx)) = heap.pop() {
        out.push((
            s.exp(),
            idx.iter().enumerate().map(|(j, &i)| per_pole[j][i].1).collect(),
        ));
        if out.len() >= limit {
            break;
        }
        for j in 0..idx.len() {
            if idx[j] + 1 < per_pole[j].len() {
                let mut next = idx.clone();
                next[j] += 1;
                if seen.insert(next.clone()) {
                    heap.push(Entry(score(&next), next));
                }
            }
        }
    }
    Ok(out)
}

/// [`estimate_lempert_warm`] without warm starts.
pub fn estimate_lempert(
    domain: &Domain,
    spec: &PoleSpec,
    z: &[Complex64],
    config: &OptimizerConfig,
) -> Result<Estimate> {
    estimate_lempert_warm(domain, spec, z, config, &[])
}

/// Certified upper bound on `l_D(p, z)` by restarted simplex search.
///
/// Admissible warm-start competitors seed extra searches and are returned
/// unchanged when nothing better is certified, so the result never exceeds
/// their objective.
pub fn estimate_lempert_warm(
    domain: &Domain,
    spec: &PoleSpec,
    z: &[Complex64],
    config: &OptimizerConfig,
    warm_starts: &[Competitor],
) -> Result<Estimate> {
    let started = Instant::now();
    domain.validate()?;
    if spec.dimension() != domain.dimension() {
        return Err(Error::DimensionMismatch {
            expected: domain.dimension(),
            actual: spec.dimension(),
        });
    }
    spec.validate_in(domain, z)?;
    if config.fit_samples < 8 || config.boundary_samples < 8 {
        return Err(Error::InvalidArgument(
            "at least eight circle samples are needed".into(),
        ));
    }
    if !(config.shrink > 0.0 && config.shrink <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "shrink factor {} outside (0, 1]",
            config.shrink
        )));
    }

    let warm: Vec<&Competitor> = warm_starts
        .iter()
        .filter(|c| admissible_warm_start(domain, spec, z, c))
        .collect();
    let m = spec.len();

    // Each problem is one branch assignment (a single one off the punctured
    // disc). Assignments are pruned by their lower bound, which ranks the
    // whole range |k_j| ≤ K.
    let mut problems = Vec::new();
    let mut jobs: Vec<(usize, usize, Vec<f64>, usize)> = Vec::new();
    if *domain == Domain::PuncturedDisc {
        let ranked = ranked_branches(spec, z[0], config.branch_bound.max(0), config.branch_keep.max(1))?;
        let mut assignments: Vec<Vec<i64>> = ranked.iter().map(|(_, k)| k.clone()).collect();
        for c in &warm {
            if let Some(b) = &c.branches {
                let mut ordered = vec![0; m];
                for (node, &k) in c.nodes.iter().zip(b) {
                    ordered[node.pole_index] = k;
                }
                if !assignments.contains(&ordered) {
                    assignments.push(ordered);
                }
            }
        }
        for branches in assignments {
            problems.push(Problem::covering(domain, spec, z[0], branches)?);
        }
    } else {
        problems.push(Problem::polynomial(domain, spec, z));
    }

    let mut index = 0usize;
    let keep: Vec<usize> = (0..problems.len()).collect();
    for &p in &keep {
        for _ in 0..config.restarts {
            jobs.push((
                index,
                p,
                restart_start(&problems[p], config.seed, index),
                config.max_iterations,
            ));
            index += 1;
        }
    }
    for c in &warm {
        let mut ordered = vec![ZERO; m];
        for node in &c.nodes {
            ordered[node.pole_index] = node.lambda;
        }
        let p = match &c.branches {
            Some(b) if *domain == Domain::PuncturedDisc => {
                let mut assignment = vec![0; m];
                for (node, &k) in c.nodes.iter().zip(b) {
                    assignment[node.pole_index] = k;
                }
                problems
                    .iter()
                    .position(|pr| pr.branches.as_ref() == Some(&assignment))
            }
            _ => Some(0),
        };
        if let Some(p) = p {
            jobs.push((index, p, params_from(&ordered), config.max_iterations));
            index += 1;
        }
    }

    let mut runs: Vec<RunResult> = jobs
        .into_par_iter()
        .map(|(i, p, start, iterations)| run_search(&problems[p], p, i, start, iterations))
        .collect();
    let restarts_used = runs.len();
    let order = |a: &RunResult, b: &RunResult| a.value.total_cmp(&b.value).then(a.index.cmp(&b.index));
    runs.sort_by(order);
    // Continue the leading runs with a larger budget.
    let polished: Vec<RunResult> = runs
        .iter()
        .take(POLISHED_RUNS)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|r| {
            let budget = POLISH_BUDGET * config.max_iterations;
            let mut more = run_search(
                &problems[r.problem],
                r.problem,
                r.index,
                params_from(&r.nodes),
                budget,
            );
            more.iterations += r.iterations;
            more
        })
        .collect();
    for (run, more) in runs.iter_mut().zip(polished) {
        if more.value < run.value && more.feasible {
            *run = more;
        }
    }
    runs.sort_by(order);
    let iterations = runs.iter().map(|r| r.iterations).sum();

    let mut best: Option<(f64, usize, Competitor)> = None;
    let mut certified = 0;
    for run in runs.iter().filter(|r| r.feasible).take(CERTIFICATION_ATTEMPTS) {
        if certified >= CERTIFIED_CANDIDATES {
            break;
        }
        let Some(c) = certify_run(&problems[run.problem], run, config) else {
            continue;
        };
        certified += 1;
        let value = objective(&c, spec)?;
        if best
            .as_ref()
            .is_none_or(|(v, i, _)| (value, run.index) < (*v, *i))
        {
            best = Some((value, run.index, c));
        }
    }
    for (w, c) in warm.iter().enumerate() {
        let value = objective(c, spec)?;
        let idx = index + w;
        if best.as_ref().is_none_or(|(v, i, _)| (value, idx) < (*v, *i)) {
            best = Some((value, idx, (*c).clone()));
        }
    }

    let runtime_ms = started.elapsed().as_millis() as u64;
    Ok(match best {
        Some((value, _, competitor)) => Estimate {
            value,
            competitor: Some(competitor),
            certified: true,
            restarts_used,
            iterations,
            seed: config.seed,
            runtime_ms,
        },
        None => Estimate::uncertified(restarts_used, iterations, config.seed, runtime_ms),
    })
}

/// Newton refinement of a root of `p − target`.
fn polish_root(p: &Poly, dp: &Poly, target: Complex64, mut x: Complex64) -> Complex64 {
    for _ in 0..30 {
        let d = dp.eval(x);
        if d == ZERO {
            break;
        }
        let step = (p.eval(x) - target) / d;
        x -= step;
        if step.norm() < 1e-17 {
            break;
        }
    }
    x
}

/// Preimages in the open unit disc of `target` under the polynomial `p`.
fn preimages(p: &Poly, target: Complex64) -> Vec<Complex64> {
    let shifted = p - &Poly::constant(target);
    if shifted.degree() == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    shifted
        .roots()
        .into_iter()
        .map(|r| polish_root(p, &dp, target, r))
        .filter(|r| r.is_finite() && r.norm() < 1.0)
        .collect()
}

/// Transfers `competitor` (built for poles `competitor_poles`) to `target`:
/// nodes of shared poles are kept and each new pole gets the preimage of
/// smallest modulus under the same disc. The disc and its certificate are
/// unchanged. `None` when some new pole has no usable preimage, which can
/// only be searched for on one-dimensional discs.
pub fn extend_competitor(
    competitor: &Competitor,
    competitor_poles: &[Vec<Complex64>],
    target: &PoleSpec,
    branch_bound: i64,
) -> Option<Competitor> {
    let mut nodes = Vec::with_capacity(target.len());
    let mut branches = competitor
        .branches
        .as_ref()
        .map(|_| Vec::with_capacity(target.len()));
    let mut fresh = Vec::new();
    for (i, pole) in target.poles().iter().enumerate() {
        let existing = competitor
            .nodes
            .iter()
            .enumerate()
            .find(|(_, n)| competitor_poles.get(n.pole_index) == Some(&pole.point));
        match existing {
            Some((pos, n)) => {
                nodes.push(Node {
                    lambda: n.lambda,
                    pole_index: i,
                });
                if let (Some(out), Some(all)) = (branches.as_mut(), competitor.branches.as_ref()) {
                    out.push(all[pos]);
                }
            }
            None => {
                fresh.push(i);
                nodes.push(Node {
                    lambda: ZERO,
                    pole_index: i,
                });
                if let Some(out) = branches.as_mut() {
                    out.push(0);
                }
            }
        }
    }

    for &i in &fresh {
        let a = target.poles()[i].point.clone();
        let candidates: Vec<(Complex64, i64)> = match competitor.disc.representation() {
            Representation::Polynomial(ps) if ps.len() == 1 && a.len() == 1 => {
                preimages(&ps[0], a[0]).into_iter().map(|r| (r, 0)).collect()
            }
            Representation::CoveringLift(u) if a.len() == 1 => (-branch_bound..=branch_bound)
                .filter_map(|k| lift_point(a[0], k).ok().map(|l| (k, l)))
                .flat_map(|(k, l)| preimages(u, l).into_iter().map(move |r| (r, k)))
                .collect(),
            _ => Vec::new(),
        };
        let taken: Vec<Complex64> = nodes
            .iter()
            .filter(|n| n.lambda != ZERO)
            .map(|n| n.lambda)
            .collect();
        let best = candidates
            .into_iter()
            .filter(|(r, _)| r.norm() > 0.0 && taken.iter().all(|t| (t - r).norm() > 0.0))
            .filter(|(r, _)| {
                let v = competitor.disc.eval_unchecked(*r);
                v.iter()
                    .zip(&a)
                    .all(|(x, y)| (x - y).norm() < INTERPOLATION_TOLERANCE)
            })
            .min_by(|x, y| x.0.norm().total_cmp(&y.0.norm()).then(x.1.abs().cmp(&y.1.abs())))?;
        nodes[i].lambda = best.0;
        if let Some(out) = branches.as_mut() {
            out[i] = best.1;
        }
    }

    let mut extended = Competitor::new(
        competitor.disc.clone(),
        competitor.base_point.clone(),
        nodes,
        competitor.certificate,
    )
    .ok()?;
    if let Some(b) = branches {
        extended = extended.with_branches(b);
    }
    (extended.interpolation_residual(&target.points()) < INTERPOLATION_TOLERANCE).then_some(extended)
}
