//! Acceptance criteria 1–6. Prints one PASS or FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::TAU;
use std::process::ExitCode;

use lempert_core::discs::{build_interpolating_disc, eval_disc, restrict_competitor, Node};
use lempert_core::domains::{certify_disc_in_domain, circle_samples};
use lempert_core::lempert::{estimate_lempert, objective};
use lempert_core::{
    blaschke_interpolate, blaschke_product, AnalyticDisc, Competitor, Complex64, Domain, OptimizerConfig,
    Pole, PoleSpec, Poly, Representation, ZeroSequence,
};
use lempert_lab::experiments::ORACLE_TOLERANCE;
use lempert_lab::{run_experiment, ExperimentConfig, ExperimentId, Report, ResultRow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(id: ExperimentId) -> Report {
    run_experiment(&ExperimentConfig::builtin(id)).expect("committed config runs")
}

fn rel_gap(row: &ResultRow) -> f64 {
    row.gap.unwrap() / row.oracle.unwrap()
}

fn failures(report: &Report) -> String {
    if report.failures.is_empty() {
        String::new()
    } else {
        format!("; failed: {}", report.failures.join(" | "))
    }
}

fn disc_oracle() -> Outcome {
    let report = run(ExperimentId::DiscOracle);
    let worst = report.rows.iter().map(|r| rel_gap(r).abs()).fold(0.0, f64::max);
    let slowest = report.rows.iter().filter_map(|r| r.runtime_ms).max().unwrap_or(0);
    let pass = report.passed() && report.rows.len() == 20 && worst <= ORACLE_TOLERANCE && slowest < 10_000;
    outcome(
        pass,
        format!(
            "{} cases, worst relative gap {worst:.2e}, slowest {slowest} ms{}",
            report.rows.len(),
            failures(&report)
        ),
    )
}

fn bidisc_pair() -> Outcome {
    let report = run(ExperimentId::Remark2Bidisc);
    let (Some(single), Some(pair)) = (report.row("single"), report.row("pair")) else {
        return outcome(false, "missing rows");
    };
    let pass = report.passed()
        && pair.oracle == Some(0.3)
        && single.oracle == Some(0.3)
        && rel_gap(pair).abs() <= ORACLE_TOLERANCE
        && rel_gap(single).abs() <= ORACLE_TOLERANCE;
    outcome(
        pass,
        format!(
            "oracle 0.3 for both; pair estimate {:.6}, single estimate {:.6}{}",
            pair.estimate,
            single.estimate,
            failures(&report)
        ),
    )
}

fn product_convergence() -> Outcome {
    let report = run(ExperimentId::Example4Product);
    let config = ExperimentConfig::builtin(ExperimentId::Example4Product);
    let radius = config.poles.radius.unwrap();
    let mut pass = report.passed() && report.rows.len() == 8;
    for (i, row) in report.rows.iter().enumerate() {
        let m = i as i32 + 1;
        let product: f64 = radius.powi(m);
        if m >= 6 {
            pass &= product < 0.1 && row.oracle == Some(0.1);
        }
        pass &= rel_gap(row).abs() <= ORACLE_TOLERANCE;
    }
    let worst = report.rows.iter().map(|r| rel_gap(r).abs()).fold(0.0, f64::max);
    outcome(
        pass,
        format!(
            "m = 1..8, oracle 0.1 from m = 6, worst relative gap {worst:.2e}{}",
            failures(&report)
        ),
    )
}

fn covering() -> Outcome {
    let report = run(ExperimentId::CoveringCounterexample);
    let rows = ["single-a1", "single-a2", "pair"].map(|c| report.row(c).cloned());
    let [Some(a1), Some(a2), Some(pair)] = rows else {
        return outcome(false, "missing rows");
    };
    let (o1, o2, o12) = (a1.oracle.unwrap(), a2.oracle.unwrap(), pair.oracle.unwrap());
    let margin = o1.min(o2) - o12;
    let pass = report.passed()
        && (o12 - o1 * o2).abs() <= 1e-12 * o12
        && margin > 0.0
        && rel_gap(&pair).abs() <= ORACLE_TOLERANCE;
    outcome(
        pass,
        format!(
            "pair oracle {o12:.6} = {o1:.6} x {o2:.6}, margin {margin:.4}, pair estimate {:.6}{}",
            pair.estimate,
            failures(&report)
        ),
    )
}

fn truncation() -> Outcome {
    let report = run(ExperimentId::Theorem1Truncation);
    let terms: Vec<&ResultRow> = report.rows.iter().filter(|r| r.case.starts_with("m=")).collect();
    let nonincreasing = terms.windows(2).all(|w| w[1].estimate <= w[0].estimate);
    let within = terms.iter().all(|r| rel_gap(r).abs() <= ORACLE_TOLERANCE);
    let stop = report.rows.iter().find(|r| r.case.starts_with("stop-m="));
    let pass = report.passed() && terms.len() == 8 && nonincreasing && within && stop.is_some();
    outcome(
        pass,
        format!(
            "8 terms nonincreasing: {nonincreasing}, within tolerance: {within}, stopping rule: {}{}",
            stop.map_or("not triggered".to_string(), |r| format!(
                "triggered at {}",
                &r.case[5..]
            )),
            failures(&report)
        ),
    )
}

fn random_point(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..max), rng.gen_range(0.0..TAU))
}

fn separated(rng: &mut ChaCha8Rng, n: usize, max: f64, gap: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_point(rng, max);
        if p.norm() >= gap && out.iter().all(|q| (p - q).norm() >= gap) {
            out.push(p);
        }
    }
    out
}

fn blaschke_modulus(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let zeros = ZeroSequence::from_values(&separated(rng, n, 0.95, 1e-3)).unwrap();
        for u in circle_samples(256) {
            worst = worst.max((blaschke_product(&zeros, u).unwrap().norm() - 1.0).abs());
        }
    }
    worst
}

fn interpolation_residuals(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let nodes = separated(rng, n, 0.9, 0.05);
        let values: Vec<Complex64> = (0..n).map(|_| random_point(rng, 1.0)).collect();
        let f = blaschke_interpolate(&ZeroSequence::from_values(&nodes).unwrap(), &values, None).unwrap();
        let z = random_point(rng, 0.5);
        let targets: Vec<Vec<Complex64>> = values.iter().map(|&v| vec![v * 0.9]).collect();
        let free: Vec<Complex64> = (0..4).map(|_| random_point(rng, 0.2)).collect();
        let disc = build_interpolating_disc(&[z], &nodes, &targets, &[free]).unwrap();
        worst = worst.max((eval_disc(&disc, Complex64::new(0.0, 0.0)).unwrap()[0] - z).norm());
        for ((&l, &v), t) in nodes.iter().zip(&values).zip(&targets) {
            worst = worst.max((f.eval(l) - v).norm());
            worst = worst.max((eval_disc(&disc, l).unwrap()[0] - t[0]).norm());
        }
    }
    worst
}

/// Counts violations of `objective(restrict(c, B)) ≥ objective(c)` over
/// `cases` sampled competitors and subsets.
fn restriction_transfer(rng: &mut ChaCha8Rng, cases: usize) -> usize {
    let f = Poly::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.1, 0.2),
    ]);
    let mut violations = 0;
    for _ in 0..cases {
        let z = random_point(rng, 0.3);
        let g = Poly::new(vec![z, f.coeffs()[1], f.coeffs()[2]]);
        let n = rng.gen_range(1..=6);
        let lambdas = separated(rng, n, 0.9, 0.05);
        let disc = AnalyticDisc::polynomial(vec![g.clone()]).unwrap();
        let cert = certify_disc_in_domain(&Domain::UnitDisc, &disc).unwrap();
        let poles = lambdas
            .iter()
            .map(|&l| Pole::scalar(g.eval(l), rng.gen_range(0.01..2.0)))
            .collect();
        let spec = PoleSpec::finite(poles).unwrap();
        let nodes = lambdas
            .iter()
            .enumerate()
            .map(|(i, &lambda)| Node {
                lambda,
                pole_index: i,
            })
            .collect();
        let c = Competitor::new(disc, vec![z], nodes, cert).unwrap();
        let mask = rng.gen_range(1u32..(1 << n));
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let restricted = restrict_competitor(&c, &subset).unwrap();
        let lhs = objective(&restricted, &spec.restrict(&subset).unwrap()).unwrap();
        if lhs < objective(&c, &spec).unwrap() {
            violations += 1;
        }
    }
    violations
}

/// Samples points of certified discs over the closed unit disc. Returns the
/// number of points checked and of points outside the domain or closer to
/// its boundary than the certified margin.
fn certification_soundness(rng: &mut ChaCha8Rng, points: usize) -> (usize, usize) {
    let (mut checked, mut bad) = (0, 0);
    while checked < points {
        let kind = rng.gen_range(0..4);
        let size = rng.gen_range(0.3..1.2);
        let mut poly = || {
            let cs: Vec<Complex64> = (0..6).map(|_| random_point(rng, 1.0)).collect();
            let total: f64 = cs.iter().map(|c| c.norm()).sum();
            Poly::new(cs.into_iter().map(|c| c * (size / total)).collect())
        };
        let (domain, disc) = match kind {
            0 => (Domain::UnitDisc, AnalyticDisc::polynomial(vec![poly()]).unwrap()),
            1 => (
                Domain::bidisc(),
                AnalyticDisc::polynomial(vec![poly(), poly()]).unwrap(),
            ),
            2 => (
                Domain::EuclideanBall { n: 2 },
                AnalyticDisc::polynomial(vec![poly(), poly()]).unwrap(),
            ),
            _ => (
                Domain::PuncturedDisc,
                AnalyticDisc::covering_lift(poly()).unwrap(),
            ),
        };
        let cert = certify_disc_in_domain(&domain, &disc).unwrap();
        if !cert.certified {
            continue;
        }
        for _ in 0..1000 {
            let lambda = Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
            let image = eval_disc(&disc, lambda).unwrap();
            checked += 1;
            if !domain.contains(&image).unwrap() {
                bad += 1;
                continue;
            }
            let distance = match disc.representation() {
                Representation::Polynomial(_) => domain.boundary_distance(&image).unwrap(),
                _ => 1.0 - image[0].norm(),
            };
            if distance < cert.margin - 1e-12 {
                bad += 1;
            }
        }
    }
    (checked, bad)
}

fn deterministic() -> bool {
    let rows = |id| {
        let mut out = Vec::new();
        run(id).write_rows(&mut out, false).unwrap();
        out
    };
    let estimate = || {
        let spec = PoleSpec::finite(vec![Pole::scalar(Complex64::new(0.5, 0.0), 1.0)]).unwrap();
        let config = OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::default()
        };
        let e = estimate_lempert(&Domain::UnitDisc, &spec, &[Complex64::new(0.0, 0.0)], &config).unwrap();
        serde_json::to_string(&lempert_core::records::EstimateRecord::new(&e, false)).unwrap()
    };
    rows(ExperimentId::CoveringCounterexample) == rows(ExperimentId::CoveringCounterexample)
        && estimate() == estimate()
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let modulus = blaschke_modulus(&mut rng);
    let residual = interpolation_residuals(&mut rng);
    let violations = restriction_transfer(&mut rng, 1000);
    let (points, unsound) = certification_soundness(&mut rng, 100_000);
    let same = deterministic();
    let pass = modulus <= 1e-10 && residual < 1e-12 && violations == 0 && unsound == 0 && same;
    outcome(
        pass,
        format!(
            "Blaschke |B|-1 {modulus:.1e}, residual {residual:.1e}, restriction violations {violations}/1000, \
             unsound points {unsound}/{points}, byte-identical reruns: {same}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("disc oracle agreement", disc_oracle),
        ("bidisc pole pair", bidisc_pair),
        ("product convergence", product_convergence),
        ("covering counterexample", covering),
        ("truncation scan", truncation),
        ("property suites", properties),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        all &= o.pass;
        println!(
            "{} criterion {} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
