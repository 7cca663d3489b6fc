use anyhow::bail;
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use rrrkit::analysis::{
    check_solution_membership, grad_direction_admissible, is_solution_direct, local_convexity_report, make_solution,
    ray_probe, stability_certificate_with, StabilityOutcome, WSpec, SOLUTION_TOL,
};
use rrrkit::model::{AnyInstance, Instance};
use rrrkit::objective::{fd_gradient, grad_f_r, numerical_wirtinger, wirtinger_asymmetry, FD_STEP, WIRTINGER_STEP};
use rrrkit::probgen::{gen_gaussian, rng_from_seed};
use rrrkit::projectors::ProjectorPair;
use rrrkit::solvers::{dr_step, hio_step, rrr_step};
use rrrkit::{Complex64, Error, Field, Scalar};

use crate::solve::load_instance;
use crate::{write_output, Suite, VerifyArgs};

/// One measurement from one sample: `passed` and the value it was judged on.
struct Obs {
    name: &'static str,
    passed: bool,
    value: f64,
    note: Option<String>,
}

fn obs(name: &'static str, value: f64, passed: bool) -> Obs {
    Obs { name, passed, value, note: None }
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    samples: usize,
    failures: usize,
    /// Range of the judged quantity across samples.
    min: f64,
    max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    suite: String,
    seed: u64,
    samples: usize,
    passed: bool,
    checks: Vec<Check>,
}

enum Source {
    Fixed(AnyInstance),
    Generated { m: usize, n: usize },
}

impl Source {
    fn real(&self, rng: &mut ChaCha8Rng) -> rrrkit::Result<Instance<f64>> {
        match self {
            Source::Fixed(AnyInstance::Real(i)) => Ok(i.clone()),
            Source::Fixed(AnyInstance::Complex(_)) => {
                Err(Error::FieldMismatch { expected: Field::Real, found: Field::Complex })
            }
            Source::Generated { m, n } => gen_gaussian::<f64>(*m, *n, rng.gen()),
        }
    }

    /// A generated instance whose magnitudes are all at least `floor`.
    fn real_bounded(&self, rng: &mut ChaCha8Rng, floor: f64) -> rrrkit::Result<Instance<f64>> {
        for _ in 0..1000 {
            let inst = self.real(rng)?;
            if inst.magnitudes().min() >= floor || matches!(self, Source::Fixed(_)) {
                return Ok(inst);
            }
        }
        Err(Error::Construction(format!("no instance with min b >= {floor} after 1000 draws")))
    }
}

fn normal(m: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(m, |_, _| f64::sample_normal(rng))
}

fn away_from_zero(m: usize, scale: f64, min_abs: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(m, |_, _| loop {
        let v = f64::sample_normal(rng) * scale;
        if v.abs() >= min_abs {
            break v;
        }
    })
}

fn typical_scale(inst: &Instance<f64>) -> f64 {
    inst.b_norm() / (inst.m() as f64).sqrt()
}

fn signed_truth(inst: &Instance<f64>, rng: &mut ChaCha8Rng) -> rrrkit::Result<DVector<f64>> {
    let yt = inst.true_measurements().ok_or(Error::MissingGroundTruth)?;
    Ok(if rng.gen_bool(0.5) { yt } else { -yt })
}

fn solutions(src: &Source, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let inst = src.real(rng)?;
    let p = ProjectorPair::new(&inst)?;
    let bn = inst.b_norm();
    let sol = make_solution(&p, &signed_truth(&inst, rng)?, WSpec::Random, rng)?;
    let fixed = [
        (dr_step(&p, &sol.y) - &sol.y).norm(),
        (rrr_step(&p, &sol.y, 0.5) - &sol.y).norm(),
        (hio_step(&p, &sol.y, 0.7) - &sol.y).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / bn;
    let member = check_solution_membership(&p, &sol.y)?.is_solution;

    let y = normal(inst.m(), rng) * typical_scale(&inst);
    let gap = p.feas_gap(&y);
    let moved = [
        (dr_step(&p, &y) - &y).norm(),
        (rrr_step(&p, &y, 0.5) - &y).norm(),
        (hio_step(&p, &y, 0.7) - &y).norm(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
        / gap;
    let agrees = check_solution_membership(&p, &y)?.is_solution == is_solution_direct(&p, &y, SOLUTION_TOL);
    Ok(vec![
        obs("solution_is_fixed_point", fixed, fixed <= 1e-10),
        obs("solution_membership", f64::from(u8::from(!member)), member),
        obs("non_solution_moves", moved, moved >= 1e-3),
        obs("membership_matches_direct_test", f64::from(u8::from(!agrees)), agrees),
    ])
}

fn convexity(src: &Source, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let inst = src.real(rng)?;
    let p = ProjectorPair::new(&inst)?;
    let yt = signed_truth(&inst, rng)?;
    let sol = match make_solution(&p, &yt, WSpec::Random, rng) {
        Err(Error::Construction(_)) => make_solution(&p, &yt, WSpec::Zero, rng)?,
        other => other?,
    };
    let r = local_convexity_report(&p, &sol.y, 50, rng)?;
    Ok(vec![
        obs("gradient_identity", r.gradient_identity_error, r.gradient_identity_ok),
        obs("monotone_gradient", r.monotonicity_margin, r.monotonicity_margin >= 0.0),
        obs("unit_strong_convexity_on_col_a", r.col_deviation, r.col_deviation <= 1e-10),
        obs("one_step_at_beta_1", f64::from(u8::from(!r.one_step_ok)), r.one_step_ok),
        obs(
            "contraction",
            f64::from(u8::from(!r.contraction.iter().all(|c| c.ok))),
            r.contraction.iter().all(|c| c.ok),
        ),
    ])
}

fn stability(src: &Source, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let inst = src.real_bounded(rng, 1e-2)?;
    let p = ProjectorPair::new(&inst)?;
    let sol = make_solution(&p, &signed_truth(&inst, rng)?, WSpec::Random, rng)?;
    let mut out = Vec::new();
    for delta in [1e-8, 1e-6, 1e-4] {
        let y = &sol.y + p.p_a(&normal(inst.m(), rng)).normalize() * delta;
        match stability_certificate_with(&inst, &p, &y)? {
            StabilityOutcome::Validated(c) => {
                out.push(obs("certificate_bound", c.distance / c.bound, true));
                let min_y = y.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
                if min_y >= c.epsilon {
                    out.push(obs("tight_bound", c.tight.as_ref().map_or(f64::INFINITY, |t| t.distance / c.epsilon), c.tight.is_some()));
                }
            }
            StabilityOutcome::Failed { reason, .. } => out.push(Obs {
                name: "certificate_bound",
                passed: false,
                value: f64::INFINITY,
                note: Some(reason),
            }),
        }
    }
    let far = normal(inst.m(), rng) * typical_scale(&inst);
    let failed = matches!(stability_certificate_with(&inst, &p, &far), Ok(StabilityOutcome::Failed { .. }));
    out.push(obs("far_point_reports_failure", f64::from(u8::from(!failed)), failed));
    Ok(out)
}

fn ray(src: &Source, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let inst = src.real(rng)?;
    let p = ProjectorPair::new(&inst)?;
    let y = normal(inst.m(), rng) * typical_scale(&inst);
    let d = away_from_zero(inst.m(), 1.0, 1e-3, rng);
    let t = y.iter().zip(d.iter()).map(|(a, b)| (a / b).abs()).fold(0.0, f64::max);
    let fit = ray_probe(&p, &y, &d, &[1.5 * t, 2.0 * t, 3.0 * t, 5.0 * t])?;
    let resid = fit.residual.unwrap_or(0.0);

    let y = away_from_zero(inst.m(), typical_scale(&inst), 1e-3, rng);
    let admissible = grad_direction_admissible(&p, &y)?;
    let g = grad_f_r(&p, &y)?;
    let t = y.iter().zip(g.iter()).map(|(a, b)| (a / b).abs()).fold(0.0, f64::max);
    let grid: Vec<f64> = [1.5, 2.0, 4.0, 10.0, 100.0, 1e4].iter().map(|k| k * t).collect();
    let g_fit = ray_probe(&p, &y, &g, &grid)?;
    let last = g_fit.values.last().map_or(f64::NAN, |v| v.1);
    Ok(vec![
        obs("leading_coefficient", fit.leading_rel_err, fit.leading_rel_err <= 1e-8),
        obs("quadratic_residual", resid, resid <= 1e-9),
        obs("gradient_direction_admissible", f64::from(u8::from(!admissible)), admissible),
        obs("gradient_ray_escapes", last, g_fit.grows() && last > 0.0),
    ])
}

fn complex_y(m: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(m, |_, _| loop {
        let v = Complex64::sample_normal(rng) * 2.0;
        if v.norm() >= 0.1 {
            break v;
        }
    })
}

fn wirtinger_complex(inst: &Instance<Complex64>, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let p = ProjectorPair::new(inst)?;
    let y = complex_y(inst.m(), rng);
    let mut gap = 0.0f64;
    let mut mismatch = 0.0f64;
    for i in 0..inst.m() {
        for k in (0..inst.m()).filter(|&k| k != i) {
            let closed = wirtinger_asymmetry(&p, &y, i, k)?;
            let num = numerical_wirtinger(&p, &y, i, k, WIRTINGER_STEP)?;
            gap = gap.max(closed.gap());
            for (c, e) in [(closed.ik, num.ik), (closed.ki, num.ki)] {
                mismatch = mismatch.max((c - e).norm() / c.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(vec![
        obs("asymmetry_certified_complex", gap, gap >= 1e-6),
        obs("closed_form_matches_numerical", mismatch, mismatch <= 1e-6),
    ])
}

fn wirtinger_real(inst: &Instance<f64>, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let p = ProjectorPair::new(inst)?;
    let y = away_from_zero(inst.m(), 2.0, 0.1, rng);
    let mut gap = 0.0f64;
    for i in 0..inst.m() {
        for k in (0..inst.m()).filter(|&k| k != i) {
            gap = gap
                .max(wirtinger_asymmetry(&p, &y, i, k)?.gap())
                .max(numerical_wirtinger(&p, &y, i, k, WIRTINGER_STEP)?.gap());
        }
    }
    Ok(vec![obs("symmetry_certified_real", gap, gap <= 1e-10)])
}

fn wirtinger(src: &Source, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    match src {
        Source::Fixed(AnyInstance::Complex(i)) => wirtinger_complex(i, rng),
        Source::Fixed(AnyInstance::Real(i)) => wirtinger_real(i, rng),
        Source::Generated { m, n } => {
            let mut out = wirtinger_complex(&gen_gaussian::<Complex64>(*m, *n, rng.gen())?, rng)?;
            out.extend(wirtinger_real(&gen_gaussian::<f64>(*m, *n, rng.gen())?, rng)?);
            Ok(out)
        }
    }
}

fn gradcheck(src: &Source, rng: &mut ChaCha8Rng) -> rrrkit::Result<Vec<Obs>> {
    let inst = src.real(rng)?;
    let p = ProjectorPair::new(&inst)?;
    let y = away_from_zero(inst.m(), typical_scale(&inst), 1e-2, rng);
    let g = grad_f_r(&p, &y)?;
    let fd = fd_gradient(&p, &y, FD_STEP)?;
    let fd_err = (&g - fd).amax() / (1e-5 * (1.0 + g.amax()));
    let beta = rng.gen_range(0.05..1.95);
    let step_err = (rrr_step(&p, &y, beta) - (&y - &g * beta)).norm() / y.norm();
    Ok(vec![
        obs("finite_difference_gradient", fd_err, fd_err <= 1.0),
        obs("rrr_is_gradient_step", step_err, step_err <= 1e-12),
    ])
}

fn sample(suite: Suite, src: &Source, seed: u64, idx: usize) -> Vec<Obs> {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(idx as u64);
    let result = match suite {
        Suite::Solutions => solutions(src, &mut rng),
        Suite::Convexity => convexity(src, &mut rng),
        Suite::Stability => stability(src, &mut rng),
        Suite::Ray => ray(src, &mut rng),
        Suite::Wirtinger => wirtinger(src, &mut rng),
        Suite::Gradcheck => gradcheck(src, &mut rng),
    };
    result.unwrap_or_else(|e| {
        vec![Obs { name: "preconditions", passed: false, value: f64::INFINITY, note: Some(e.to_string()) }]
    })
}

fn merge(per_sample: Vec<Vec<Obs>>) -> Vec<Check> {
    let mut checks: Vec<Check> = Vec::new();
    for o in per_sample.into_iter().flatten() {
        let c = match checks.iter_mut().find(|c| c.name == o.name) {
            Some(c) => c,
            None => {
                checks.push(Check {
                    name: o.name.to_string(),
                    passed: true,
                    samples: 0,
                    failures: 0,
                    min: f64::INFINITY,
                    max: f64::NEG_INFINITY,
                    note: None,
                });
                checks.last_mut().unwrap()
            }
        };
        c.samples += 1;
        c.min = c.min.min(o.value);
        c.max = c.max.max(o.value);
        if !o.passed {
            c.passed = false;
            c.failures += 1;
            if c.note.is_none() {
                c.note = o.note;
            }
        }
    }
    checks
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Solutions => "solutions",
        Suite::Convexity => "convexity",
        Suite::Stability => "stability",
        Suite::Ray => "ray",
        Suite::Wirtinger => "wirtinger",
        Suite::Gradcheck => "gradcheck",
    }
}

/// Returns `Ok(false)` when some check failed.
pub fn run(args: &VerifyArgs) -> anyhow::Result<bool> {
    if args.samples == 0 {
        bail!("--samples must be at least 1");
    }
    let src = match &args.inst {
        Some(path) => Source::Fixed(load_instance(path)?),
        None => {
            if args.n == 0 || args.m < args.n {
                bail!("need 1 <= n <= m, got m = {}, n = {}", args.m, args.n);
            }
            Source::Generated { m: args.m, n: args.n }
        }
    };
    let per_sample: Vec<Vec<Obs>> =
        (0..args.samples).into_par_iter().map(|idx| sample(args.suite, &src, args.seed, idx)).collect();
    let checks = merge(per_sample);
    let passed = checks.iter().all(|c| c.passed);
    let report = Report {
        schema: 1,
        suite: suite_name(args.suite).to_string(),
        seed: args.seed,
        samples: args.samples,
        passed,
        checks,
    };
    write_output(args.out.as_ref(), &serde_json::to_vec_pretty(&report)?)?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        match &c.note {
            Some(note) => eprintln!("verification failed: {} ({note})", c.name),
            None => eprintln!("verification failed: {} ({} of {} samples)", c.name, c.failures, c.samples),
        }
    }
    Ok(passed)
}
