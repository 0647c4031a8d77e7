//! The six experiments. Each one calls the estimator and the oracles from
//! `lempert-core`, records one row per case and collects the row-level
//! assertions that failed.

use std::f64::consts::TAU;
use std::io::Write;

use lempert_core::blaschke::BoundarySchedule;
use lempert_core::lempert::{
    check_monotonicity, estimate_lempert, finite_truncation_scan, lempert_disc_oracle,
    lempert_product_oracle, lempert_punctured_oracle, PoleGenerator,
};
use lempert_core::{
    mobius_factor, Complex64, Domain, Estimate, OptimizerConfig, Pole, PoleSpec, UnitDiscPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::Result;

/// Relative agreement required between estimates and oracles.
pub const ORACLE_TOLERANCE: f64 = 1e-2;
/// Certified estimates are upper bounds, so they may undercut an exact oracle
/// only by rounding.
pub const SOUNDNESS_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: ExperimentId,
    pub case: String,
    pub estimate: f64,
    pub oracle: Option<f64>,
    /// `estimate − oracle`.
    pub gap: Option<f64>,
    pub certified: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub experiment_id: ExperimentId,
    pub rows: Vec<ResultRow>,
    /// One message per failed assertion, naming the case.
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn row(&self, case: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.case == case)
    }

    /// One JSON record per line. Times are dropped unless `with_timing`.
    pub fn write_rows<W: Write>(&self, mut out: W, with_timing: bool) -> Result<()> {
        for row in &self.rows {
            let mut row = row.clone();
            if !with_timing {
                row.runtime_ms = None;
            }
            serde_json::to_writer(&mut out, &row)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{:<28} {:>12} {:>12} {:>11} {:>5} {:>8}",
            "case", "estimate", "oracle", "gap", "cert", "ms"
        )?;
        let opt = |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |v| format!("{v:.prec$e}"));
        for r in &self.rows {
            writeln!(
                out,
                "{:<28} {:>12.8} {:>12} {:>11} {:>5} {:>8}",
                r.case,
                r.estimate,
                r.oracle.map_or("-".to_string(), |v| format!("{v:.8}")),
                opt(r.gap, 2),
                if r.certified { "yes" } else { "no" },
                r.runtime_ms.map_or("-".to_string(), |t| t.to_string()),
            )?;
        }
        Ok(())
    }
}

struct Recorder {
    id: ExperimentId,
    seed: u64,
    rows: Vec<ResultRow>,
    failures: Vec<String>,
}

impl Recorder {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            id: config.experiment_id,
            seed: config.seed,
            rows: Vec::new(),
            failures: Vec::new(),
        }
    }

    /// Adds a row for `estimate` and checks certification, soundness and
    /// agreement with the oracle.
    fn estimate(&mut self, case: impl Into<String>, estimate: &Estimate, oracle: Option<f64>) {
        let case = case.into();
        let gap = oracle.map(|o| estimate.value - o);
        if !estimate.certified {
            self.fail(&case, "no certified competitor");
        }
        if let (Some(o), Some(g)) = (oracle, gap) {
            if estimate.certified && g < -SOUNDNESS_SLACK {
                self.fail(
                    &case,
                    format!("certified estimate {} is below the oracle {o}", estimate.value),
                );
            }
            if g.abs() > ORACLE_TOLERANCE * o {
                self.fail(
                    &case,
                    format!("relative gap {:.3e} exceeds {ORACLE_TOLERANCE}", g / o),
                );
            }
        }
        self.rows.push(ResultRow {
            experiment_id: self.id,
            case,
            estimate: estimate.value,
            oracle,
            gap,
            certified: estimate.certified,
            seed: estimate.seed,
            runtime_ms: Some(estimate.runtime_ms),
        });
    }

    /// A row with no estimator call behind it.
    fn oracle_only(&mut self, case: impl Into<String>, oracle: f64) {
        self.rows.push(ResultRow {
            experiment_id: self.id,
            case: case.into(),
            estimate: oracle,
            oracle: Some(oracle),
            gap: Some(0.0),
            certified: false,
            seed: self.seed,
            runtime_ms: None,
        });
    }

    fn check(&mut self, case: &str, ok: bool, message: impl Into<String>) {
        if !ok {
            self.fail(case, message);
        }
    }

    fn fail(&mut self, case: &str, message: impl Into<String>) {
        self.failures
            .push(format!("{}/{case}: {}", self.id, message.into()));
    }

    fn finish(self) -> Report {
        Report {
            experiment_id: self.id,
            rows: self.rows,
            failures: self.failures,
        }
    }
}

/// Runs the configured experiment. Errors are reserved for bad
/// configurations; failed assertions are reported in [`Report::failures`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let mut rec = Recorder::new(config);
    match config.experiment_id {
        ExperimentId::DiscOracle => disc_oracle(config, &mut rec)?,
        ExperimentId::Remark2Bidisc => remark2_bidisc(config, &mut rec)?,
        ExperimentId::Example4Product => example4_product(config, &mut rec)?,
        ExperimentId::CoveringCounterexample => covering_counterexample(config, &mut rec)?,
        ExperimentId::Theorem1Truncation => theorem1_truncation(config, &mut rec)?,
        ExperimentId::MonotonicitySuite => monotonicity_suite(config, &mut rec)?,
    }
    Ok(rec.finish())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Smallest pseudo-hyperbolic distance allowed between sampled poles and the
/// evaluation point.
const MIN_SEPARATION: f64 = 0.1;
const MAX_POLE_MODULUS: f64 = 0.9;
const MAX_POINT_MODULUS: f64 = 0.5;

/// A seeded random finite pole set in the unit disc and an evaluation point.
/// Pole moduli are uniform in `[0.05, 0.9)`, angles uniform, weights uniform
/// in `(0, max_weight]`; points closer than [`MIN_SEPARATION`] are redrawn.
pub fn random_disc_case(
    rng: &mut ChaCha8Rng,
    max_poles: usize,
    max_weight: f64,
) -> lempert_core::Result<(PoleSpec, Complex64)> {
    let polar = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
    };
    let z = polar(rng, 0.0, MAX_POINT_MODULUS);
    let n = rng.gen_range(1..=max_poles);
    let mut taken = vec![z];
    let mut poles = Vec::with_capacity(n);
    while poles.len() < n {
        let a = polar(rng, 0.05, MAX_POLE_MODULUS);
        let separated = taken.iter().all(|&b| {
            mobius_factor(UnitDiscPoint::new(a).unwrap(), UnitDiscPoint::new(b).unwrap()) >= MIN_SEPARATION
        });
        if separated {
            taken.push(a);
            let weight = max_weight * (1.0 - rng.gen::<f64>());
            poles.push(Pole::scalar(a, weight));
        }
    }
    Ok((PoleSpec::finite(poles)?, z))
}

fn disc_oracle(config: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &config.poles;
    let (cases, max_poles, max_weight) = (p.cases()?, p.max_poles()?, p.max_weight()?);
    let optimizer = config.optimizer();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for i in 0..cases {
        let (spec, z) = random_disc_case(&mut rng, max_poles, max_weight)?;
        let oracle = lempert_disc_oracle(&spec, z)?;
        let estimate = estimate_lempert(&config.domain, &spec, &[z], &optimizer)?;
        rec.estimate(format!("case-{i:02}-n{}", spec.len()), &estimate, Some(oracle));
    }
    Ok(())
}

fn remark2_bidisc(config: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let (a1, a2) = (config.poles.a1()?, config.poles.a2()?);
    let optimizer = config.optimizer();
    let origin = [c(0.0, 0.0); 2];
    let single = PoleSpec::finite(vec![Pole::new(vec![c(a1, 0.0), c(a1, 0.0)], 1.0)])?;
    let pair = PoleSpec::finite(vec![
        Pole::new(vec![c(a1, 0.0), c(a1, 0.0)], 1.0),
        Pole::new(vec![c(a2, 0.0), c(a1, 0.0)], 1.0),
    ])?;
    let single_oracle = lempert_product_oracle(&single, &origin)?;
    let pair_oracle = lempert_product_oracle(&pair, &origin)?;
    let single_estimate = estimate_lempert(&config.domain, &single, &origin, &optimizer)?;
    let pair_estimate = estimate_lempert(&config.domain, &pair, &origin, &optimizer)?;
    rec.estimate("single", &single_estimate, Some(single_oracle));
    rec.estimate("pair", &pair_estimate, Some(pair_oracle));
    rec.check(
        "pair",
        pair_oracle == a1,
        format!("oracle {pair_oracle} differs from {a1}"),
    );
    rec.check(
        "pair",
        pair_oracle == single_oracle,
        "the extra pole changed the oracle value",
    );
    Ok(())
}

fn example4_product(config: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &config.poles;
    let (w, radius, m_max) = (p.w()?, p.radius()?, p.m_max()?);
    let optimizer = config.optimizer();
    let point = [c(0.0, 0.0), c(w, 0.0)];
    for m in 1..=m_max {
        let poles = (0..m)
            .map(|j| {
                Pole::new(
                    vec![Complex64::from_polar(radius, TAU * j as f64 / 8.0), c(0.0, 0.0)],
                    1.0,
                )
            })
            .collect();
        let spec = PoleSpec::finite(poles)?;
        let oracle = lempert_product_oracle(&spec, &point)?;
        let estimate = estimate_lempert(&config.domain, &spec, &point, &optimizer)?;
        let case = format!("m={m}");
        rec.estimate(&case, &estimate, Some(oracle));
        if radius.powi(m as i32) < w {
            rec.check(
                &case,
                oracle == w,
                format!("oracle {oracle} differs from |w| = {w}"),
            );
        }
    }
    Ok(())
}

fn covering_counterexample(config: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &config.poles;
    let (a1, a2, z, branches) = (p.a1()?, p.a2()?, p.z()?, p.oracle_branches()?);
    let optimizer = config.optimizer();
    let z = c(z, 0.0);
    let first = PoleSpec::finite(vec![Pole::scalar(c(a1, 0.0), 1.0)])?;
    let second = PoleSpec::finite(vec![Pole::scalar(c(a2, 0.0), 1.0)])?;
    let pair = PoleSpec::finite(vec![Pole::scalar(c(a1, 0.0), 1.0), Pole::scalar(c(a2, 0.0), 1.0)])?;
    let mut values = Vec::with_capacity(3);
    for (case, spec) in [("single-a1", &first), ("single-a2", &second), ("pair", &pair)] {
        let oracle = lempert_punctured_oracle(spec, z, branches)?;
        rec.check(case, oracle.converged, "branch range too small for the oracle");
        let estimate = estimate_lempert(&config.domain, spec, &[z], &optimizer)?;
        rec.estimate(case, &estimate, Some(oracle.value));
        values.push((oracle.value, estimate.value));
    }
    let [(o1, e1), (o2, e2), (o12, e12)] = values[..] else {
        unreachable!()
    };
    rec.check(
        "pair",
        (o12 - o1 * o2).abs() <= 1e-12 * o12,
        format!("pair oracle {o12} is not the product {}", o1 * o2),
    );
    let margin = o1.min(o2) - o12;
    rec.check(
        "pair",
        margin > 0.0,
        format!("no strict oracle margin ({margin})"),
    );
    rec.check(
        "pair",
        e12 < e1.min(e2),
        format!("pair estimate {e12} is not below the single estimates"),
    );
    rec.oracle_only("margin", margin);
    Ok(())
}

fn theorem1_truncation(config: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &config.poles;
    let (t, z, m_max) = (p.t()?, p.z()?, p.m_max()?);
    let generator = PoleGenerator::BoundarySchedule {
        schedule: BoundarySchedule::new(t)?,
        weight: 1.0,
    };
    let z = [c(z, 0.0)];
    let partial = |m: usize| -> lempert_core::Result<f64> {
        lempert_disc_oracle(&PoleSpec::countable(generator, m)?, z[0])
    };

    let report = finite_truncation_scan(&config.domain, &generator, &z, m_max, &config.optimizer())?;
    let values = report.values();
    rec.check(
        "scan",
        values.len() == m_max,
        format!("scan ended after {} terms", values.len()),
    );
    for (i, estimate) in report.estimates.iter().enumerate() {
        let m = i + 1;
        rec.estimate(format!("m={m}"), estimate, Some(partial(m)?));
        if i > 0 && values[i] > values[i - 1] {
            rec.fail(
                &format!("m={m}"),
                format!("{} exceeds the previous term {}", values[i], values[i - 1]),
            );
        }
    }

    // A cheap scan long enough for successive terms to settle.
    let cheap = OptimizerConfig {
        restarts: p.stop_restarts()?,
        max_iterations: p.stop_iterations()?,
        ..config.optimizer()
    };
    let long = finite_truncation_scan(&config.domain, &generator, &z, p.stop_m_max()?, &cheap)?;
    rec.check("stop", long.nonincreasing, "long scan increased");
    match long.stopped_at {
        Some(m) => {
            let estimate = &long.estimates[m - 1];
            rec.estimate(format!("stop-m={m}"), estimate, Some(partial(m)?));
        }
        None => rec.fail("stop", format!("no stop within {} terms", long.estimates.len())),
    }
    Ok(())
}

struct MonotoneCase {
    label: &'static str,
    domain: Domain,
    p: PoleSpec,
    q: PoleSpec,
    z: Vec<Complex64>,
}

fn monotonicity_suite(config: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let (a1, a2) = (config.poles.a1()?, config.poles.a2()?);
    let optimizer = config.optimizer();
    let scalar = |poles: &[(f64, f64, f64)]| {
        PoleSpec::finite(
            poles
                .iter()
                .map(|&(re, im, w)| Pole::scalar(c(re, im), w))
                .collect(),
        )
    };
    let bidisc_pole = |x: f64| Pole::new(vec![c(x, 0.0), c(a1, 0.0)], 1.0);
    let cases = [
        MonotoneCase {
            label: "disc-extra-pole",
            domain: Domain::UnitDisc,
            p: scalar(&[(a1, 0.0, 1.0)])?,
            q: scalar(&[(a1, 0.0, 1.0), (-a2, 0.0, 1.0)])?,
            z: vec![c(0.1, 0.0)],
        },
        MonotoneCase {
            label: "disc-heavier-weight",
            domain: Domain::UnitDisc,
            p: scalar(&[(a1, a1, 0.5), (-a2, 0.0, 1.0)])?,
            q: scalar(&[(a1, a1, 1.5), (-a2, 0.0, 1.0)])?,
            z: vec![c(0.0, 0.0)],
        },
        MonotoneCase {
            label: "bidisc-extra-pole",
            domain: Domain::bidisc(),
            p: PoleSpec::finite(vec![bidisc_pole(a1)])?,
            q: PoleSpec::finite(vec![bidisc_pole(a1), bidisc_pole(a2)])?,
            z: vec![c(0.0, 0.0); 2],
        },
        MonotoneCase {
            label: "punctured-extra-pole",
            domain: Domain::PuncturedDisc,
            p: scalar(&[(a1, 0.0, 1.0)])?,
            q: scalar(&[(a1, 0.0, 1.0), (-a2, 0.0, 1.0)])?,
            z: vec![c(0.1, 0.0)],
        },
    ];
    for case in cases {
        let oracle = |spec: &PoleSpec| -> lempert_core::Result<f64> {
            match case.domain {
                Domain::UnitDisc => lempert_disc_oracle(spec, case.z[0]),
                Domain::PuncturedDisc => Ok(lempert_punctured_oracle(spec, case.z[0], 50)?.value),
                _ => lempert_product_oracle(spec, &case.z),
            }
        };
        let (op, oq) = (oracle(&case.p)?, oracle(&case.q)?);
        let report = check_monotonicity(&case.domain, &case.p, &case.q, &case.z, &optimizer)?;
        let (p_case, q_case) = (format!("{}/p", case.label), format!("{}/q", case.label));
        rec.estimate(&p_case, &report.p_estimate, Some(op));
        rec.estimate(&q_case, &report.q_estimate, Some(oq));
        rec.check(&q_case, oq <= op, format!("oracle increased from {op} to {oq}"));
        // Ordering is only guaranteed through a transferred competitor; the
        // bidisc pair has no disc through both poles near the p optimum.
        rec.check(
            &q_case,
            !report.transferred || report.ordered,
            "q estimate exceeds the p estimate despite the transfer",
        );
    }
    Ok(())
}
