//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! verdicts are printed even when everything passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use rrrkit::analysis::{
    check_solution_membership, grad_direction_admissible, is_solution_direct, local_convexity_report, make_solution,
    ray_probe, stability_certificate_with, StabilityOutcome, WSpec, SOLUTION_TOL,
};
use rrrkit::model::{Algorithm, Init, RunConfig};
use rrrkit::objective::{fd_gradient, grad_f_r, numerical_wirtinger, wirtinger_asymmetry, FD_STEP, WIRTINGER_STEP};
use rrrkit::probgen::{gen_gaussian, gen_oversampled_dft, random_init, rng_from_seed};
use rrrkit::projectors::ProjectorPair;
use rrrkit::solvers::{dr_step, hio_step, raar_step, rrr_step, run_with, RunStatus};
use rrrkit::{RealInstance, Scalar};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn normal_vec<S: Scalar>(m: usize, rng: &mut ChaCha8Rng) -> DVector<S> {
    DVector::from_fn(m, |_, _| S::sample_normal(rng))
}

/// Real vector with every coordinate at least `min_abs` in magnitude.
fn away_from_zero(m: usize, scale: f64, min_abs: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(m, |_, _| loop {
        let v: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
        if v.abs() >= min_abs {
            break v;
        }
    })
}

fn random_real_instance(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> RealInstance {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(n + 1..=max_m.max(n + 1));
    gen_gaussian::<f64>(m, n, rng.gen()).unwrap()
}

fn pair(inst: &RealInstance) -> ProjectorPair<f64> {
    ProjectorPair::new(inst).unwrap()
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    let mut worst_fd = 0.0f64;
    let mut worst_rrr = 0.0f64;
    for _ in 0..100 {
        let inst = random_real_instance(&mut rng, 40, 20);
        let p = pair(&inst);
        let scale = inst.b_norm() / (inst.m() as f64).sqrt();
        let y = away_from_zero(inst.m(), scale, 1e-2, &mut rng);
        let g = grad_f_r(&p, &y).unwrap();
        let fd = fd_gradient(&p, &y, FD_STEP).unwrap();
        worst_fd = worst_fd.max((&g - &fd).amax() / (1e-5 * (1.0 + g.amax())));
        let beta = rng.gen_range(0.05..1.95);
        let expected = &y - &g * beta;
        worst_rrr = worst_rrr.max((rrr_step(&p, &y, beta) - expected).norm() / (1e-12 * y.norm()));
    }
    let elapsed = start.elapsed();
    verdict(
        worst_fd <= 1.0 && worst_rrr <= 1.0 && elapsed < Duration::from_secs(10),
        format!(
            "fd error / tol = {worst_fd:.3}, rrr - (y - beta grad) / tol = {worst_rrr:.3}, {:.2?}",
            elapsed
        ),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut rng = rng_from_seed(202);
    let real: Vec<_> = (0..10).map(|_| pair(&random_real_instance(&mut rng, 12, 6))).collect();
    let complex: Vec<_> = (0..10)
        .map(|i| ProjectorPair::new(&gen_gaussian::<Complex64>(10, 4, 300 + i).unwrap()).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for t in 0..1000 {
        if t % 2 == 0 {
            let p = &real[t % real.len()];
            let y = normal_vec::<f64>(p.m(), &mut rng) * 3.0;
            let dr = dr_step(p, &y);
            for other in [hio_step(p, &y, 1.0), rrr_step(p, &y, 1.0), raar_step(p, &y, 1.0)] {
                worst = worst.max((other - &dr).norm() / y.norm());
            }
        } else {
            let p = &complex[t % complex.len()];
            let y = normal_vec::<Complex64>(p.m(), &mut rng) * Complex64::new(3.0, 0.0);
            let dr = dr_step(p, &y);
            for other in [hio_step(p, &y, 1.0), rrr_step(p, &y, 1.0), raar_step(p, &y, 1.0)] {
                worst = worst.max((other - &dr).norm() / y.norm());
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max relative deviation from DR = {worst:.2e}, {elapsed:.2?}"),
    )
}

fn displacements(p: &ProjectorPair<f64>, y: &DVector<f64>) -> [f64; 5] {
    [
        (dr_step(p, y) - y).norm(),
        (rrr_step(p, y, 0.5) - y).norm(),
        (rrr_step(p, y, 1.5) - y).norm(),
        (hio_step(p, y, 0.7) - y).norm(),
        (hio_step(p, y, 1.3) - y).norm(),
    ]
}

fn criterion_3() -> Verdict {
    let mut rng = rng_from_seed(303);
    let mut worst_fixed = 0.0f64;
    let mut built = 0;
    for _ in 0..20 {
        let inst = random_real_instance(&mut rng, 30, 10);
        let p = pair(&inst);
        let yt = inst.true_measurements().unwrap();
        for j in 0..10 {
            let spec = if j == 0 { WSpec::Zero } else { WSpec::Random };
            let s = make_solution(&p, &(&yt * random_sign(&mut rng)), spec, &mut rng).unwrap();
            built += 1;
            for dsp in displacements(&p, &s.y) {
                worst_fixed = worst_fixed.max(dsp / inst.b_norm());
            }
        }
    }

    let mut worst_ratio = f64::INFINITY;
    for _ in 0..1000 {
        let inst = random_real_instance(&mut rng, 30, 10);
        let p = pair(&inst);
        let y = normal_vec::<f64>(inst.m(), &mut rng) * (inst.b_norm() / (inst.m() as f64).sqrt());
        let gap = p.feas_gap(&y);
        for dsp in displacements(&p, &y) {
            worst_ratio = worst_ratio.min(dsp / gap);
        }
    }

    let inst = gen_gaussian::<f64>(20, 5, 3030).unwrap();
    let p = pair(&inst);
    let half = inst.true_measurements().unwrap() * 0.5;
    let pb_solves = is_solution_direct(&p, &p.p_b(&half), SOLUTION_TOL);
    let half_moves = displacements(&p, &half).iter().all(|&d| d >= 1e-3 * p.feas_gap(&half));
    let half_not_solution = !is_solution_direct(&p, &half, SOLUTION_TOL);

    verdict(
        built == 200 && worst_fixed <= 1e-10 && worst_ratio >= 1e-3 && pb_solves && half_moves && half_not_solution,
        format!(
            "{built} solutions, max displacement / ||b|| = {worst_fixed:.2e}; min displacement / gap on non-solutions = {worst_ratio:.3}; y0/2: P_B(y) solves = {pb_solves}, y not fixed = {}",
            half_moves && half_not_solution
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut rng = rng_from_seed(404);
    let mut disagreements = 0;
    let mut positives = 0;
    let mut total = 0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(2 * n..=4 * n);
        let inst = gen_gaussian::<f64>(m, n, rng.gen()).unwrap();
        let p = pair(&inst);
        let bn = inst.b_norm();
        let yt = inst.true_measurements().unwrap();
        for j in 0..500 {
            let sol = make_solution(&p, &(&yt * random_sign(&mut rng)), WSpec::Random, &mut rng).unwrap();
            let y = match j % 5 {
                0 => sol.y,
                // perturbation along col(A)^⊥ of random size: may or may not stay a solution
                1 => {
                    let dir = p.p_a_c(&normal_vec::<f64>(m, &mut rng)).normalize();
                    &sol.y + dir * (bn * 10f64.powf(rng.gen_range(-6.0..0.5)))
                }
                // perturbation along col(A): never a solution
                2 => {
                    let dir = p.p_a(&normal_vec::<f64>(m, &mut rng)).normalize();
                    &sol.y + dir * (bn * 10f64.powf(rng.gen_range(-6.0..0.0)))
                }
                3 => normal_vec::<f64>(m, &mut rng) * (bn / (m as f64).sqrt()),
                _ => {
                    let scale = rng.gen_range(0.5..3.0);
                    &sol.y_tilde + &sol.w * (scale / 0.45)
                }
            };
            let member = check_solution_membership(&p, &y).unwrap().is_solution;
            let direct = is_solution_direct(&p, &y, SOLUTION_TOL);
            total += 1;
            positives += usize::from(direct);
            disagreements += usize::from(member != direct);
        }
    }

    let line = ProjectorPair::from_parts(&DMatrix::from_element(2, 1, 1.0), DVector::from_element(2, 1.0)).unwrap();
    let at = |c: f64| check_solution_membership(&line, &DVector::from_vec(vec![1.0 + c, 1.0 - c])).unwrap().is_solution;
    let inside = [-0.999, -0.5, 0.0, 0.5, 0.999].iter().all(|&c| at(c));
    let outside = [1.0 + 1e-9, 2.0, -2.0].iter().all(|&c| !at(c));

    verdict(
        disagreements == 0 && total == 10_000 && inside && outside,
        format!("{disagreements} disagreements on {total} points ({positives} solutions); |c|<1 in = {inside}, c beyond 1 out = {outside}"),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = rng_from_seed(505);
    let mut worst_grad = 0.0f64;
    let mut min_margin = f64::INFINITY;
    let mut worst_col = 0.0f64;
    let mut one_step = true;
    let mut contraction = true;
    let mut checked = 0;
    while checked < 50 {
        let inst = random_real_instance(&mut rng, 24, 8);
        let p = pair(&inst);
        let yt = inst.true_measurements().unwrap();
        let sol = make_solution(&p, &yt, WSpec::Random, &mut rng).unwrap();
        let r = local_convexity_report(&p, &sol.y, 100, &mut rng).unwrap();
        assert!(r.d > 0.0);
        worst_grad = worst_grad.max(r.gradient_identity_error);
        min_margin = min_margin.min(r.monotonicity_margin);
        worst_col = worst_col.max(r.col_deviation);
        one_step &= r.one_step_ok;
        contraction &= r.contraction.iter().all(|c| c.ok && c.steps > 0);
        checked += 1;
    }
    verdict(
        worst_grad <= 1e-10 && min_margin >= 0.0 && worst_col <= 1e-10 && one_step && contraction,
        format!(
            "{checked} solutions: grad identity err = {worst_grad:.2e}, ball margin min = {min_margin:.2e}, col(A) |margin - ||u-v||^2| max = {worst_col:.2e}, one step = {one_step}, contraction = {contraction}"
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut rng = rng_from_seed(606);
    let mut validated = 0;
    let mut attempts = 0;
    let mut tight_checked = 0;
    let mut worst_bound = 0.0f64;
    let mut far_failed = 0;
    let mut far_total = 0;
    let mut instances = 0;
    while instances < 20 {
        let inst = random_real_instance(&mut rng, 30, 10);
        if inst.magnitudes().min() < 1e-2 {
            continue;
        }
        instances += 1;
        let p = pair(&inst);
        let yt = inst.true_measurements().unwrap();
        let sol = make_solution(&p, &(&yt * random_sign(&mut rng)), WSpec::Random, &mut rng).unwrap();
        for delta in [1e-8, 1e-6, 1e-4] {
            let dir = p.p_a(&normal_vec::<f64>(inst.m(), &mut rng)).normalize();
            let y = &sol.y + dir * delta;
            attempts += 1;
            if let StabilityOutcome::Validated(c) = stability_certificate_with(&inst, &p, &y).unwrap() {
                validated += 1;
                worst_bound = worst_bound.max(c.distance / c.bound);
                let min_y = y.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
                if min_y >= c.epsilon {
                    if c.tight.is_some() {
                        tight_checked += 1;
                    } else {
                        validated -= 1;
                    }
                }
            }
        }
        for _ in 0..5 {
            let y = normal_vec::<f64>(inst.m(), &mut rng) * (inst.b_norm() / (inst.m() as f64).sqrt());
            far_total += 1;
            if let Ok(StabilityOutcome::Failed { .. }) = stability_certificate_with(&inst, &p, &y) {
                far_failed += 1;
            }
        }
    }
    verdict(
        validated == attempts && far_failed == far_total,
        format!(
            "{validated}/{attempts} perturbed solutions certified (max distance / bound = {worst_bound:.3}, tight bound on {tight_checked}); {far_failed}/{far_total} far points reported failure"
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = rng_from_seed(707);
    let mut worst_lead = 0.0f64;
    let mut worst_resid = 0.0f64;
    for _ in 0..100 {
        let inst = random_real_instance(&mut rng, 30, 10);
        let p = pair(&inst);
        let scale = inst.b_norm() / (inst.m() as f64).sqrt();
        let y = normal_vec::<f64>(inst.m(), &mut rng) * scale;
        let d = away_from_zero(inst.m(), 1.0, 1e-3, &mut rng);
        let t = y.iter().zip(d.iter()).map(|(a, b)| (a / b).abs()).fold(0.0, f64::max);
        let fit = ray_probe(&p, &y, &d, &[1.5 * t, 2.0 * t, 3.0 * t, 5.0 * t]).unwrap();
        worst_lead = worst_lead.max(fit.leading_rel_err);
        worst_resid = worst_resid.max(fit.residual.unwrap());
    }

    let mut admissible = 0;
    let mut escaped = 0;
    let total = 100;
    for _ in 0..total {
        let inst = random_real_instance(&mut rng, 30, 10);
        let p = pair(&inst);
        let y = away_from_zero(inst.m(), inst.b_norm() / (inst.m() as f64).sqrt(), 1e-3, &mut rng);
        if grad_direction_admissible(&p, &y).unwrap() {
            admissible += 1;
        }
        let g = grad_f_r(&p, &y).unwrap();
        let t = y.iter().zip(g.iter()).map(|(a, b)| (a / b).abs()).fold(0.0, f64::max);
        let grid: Vec<f64> = [1.5, 2.0, 4.0, 10.0, 100.0, 1e4].iter().map(|k| k * t).collect();
        let fit = ray_probe(&p, &y, &g, &grid).unwrap();
        if fit.grows() && fit.values.last().unwrap().1 > 0.0 {
            escaped += 1;
        }
    }
    verdict(
        worst_lead <= 1e-8 && worst_resid <= 1e-9 && admissible == total && escaped == total,
        format!(
            "leading coefficient rel err = {worst_lead:.2e}, 4th-point residual = {worst_resid:.2e}; gradient admissible {admissible}/{total}, f_R > 0 at large beta {escaped}/{total}"
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = rng_from_seed(808);
    let mut asymmetric = 0;
    let mut worst_match = 0.0f64;
    for idx in 0..50u64 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(n + 1..=8);
        let inst = gen_gaussian::<Complex64>(m, n, 8000 + idx).unwrap();
        let p = ProjectorPair::new(&inst).unwrap();
        let y = DVector::from_fn(m, |_, _| loop {
            let v = Complex64::sample_normal(&mut rng) * 2.0;
            if v.norm() >= 0.1 {
                break v;
            }
        });
        let mut max_gap = 0.0f64;
        for i in 0..m {
            for k in 0..m {
                if i == k {
                    continue;
                }
                let closed = wirtinger_asymmetry(&p, &y, i, k).unwrap();
                let num = numerical_wirtinger(&p, &y, i, k, WIRTINGER_STEP).unwrap();
                max_gap = max_gap.max(closed.gap());
                for (c, e) in [(closed.ik, num.ik), (closed.ki, num.ki)] {
                    worst_match = worst_match.max((c - e).norm() / c.norm().max(1e-300));
                }
            }
        }
        if max_gap >= 1e-6 {
            asymmetric += 1;
        }
    }

    let mut worst_real = 0.0f64;
    for idx in 0..50u64 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(n + 1..=8);
        let inst = gen_gaussian::<f64>(m, n, 9000 + idx).unwrap();
        let p = pair(&inst);
        let y = away_from_zero(m, 2.0, 0.1, &mut rng);
        for i in 0..m {
            for k in 0..m {
                if i == k {
                    continue;
                }
                let closed = wirtinger_asymmetry(&p, &y, i, k).unwrap();
                let num = numerical_wirtinger(&p, &y, i, k, WIRTINGER_STEP).unwrap();
                worst_real = worst_real.max(closed.gap()).max(num.gap());
            }
        }
    }
    verdict(
        asymmetric == 50 && worst_match <= 1e-6 && worst_real <= 1e-10,
        format!(
            "complex: asymmetric on {asymmetric}/50, closed vs numerical rel err = {worst_match:.2e}; real: max pair gap = {worst_real:.2e}"
        ),
    )
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let mut summary = Vec::new();
    let mut pass = true;
    for beta in [0.5, 1.0] {
        let mut solved = 0;
        let mut crossings = 0;
        let mut worst_err = 0.0f64;
        for seed in 0..20u64 {
            let inst = gen_gaussian::<f64>(80, 50, seed).unwrap();
            let p = pair(&inst);
            let cfg = RunConfig {
                algorithm: Algorithm::Rrr,
                beta,
                max_iters: 100_000,
                seed: 10_000 + seed,
                ..RunConfig::default()
            };
            let out = run_with(&inst, &p, &cfg).unwrap();
            if out.status == RunStatus::Solved {
                solved += 1;
                worst_err = worst_err.max(out.final_signal_error().unwrap());
                if out.trace.f_r_sign_changes(1e-9 * inst.b_norm().powi(2)) >= 2 {
                    crossings += 1;
                }
            }
        }
        pass &= solved >= 18 && crossings >= 15 && worst_err <= 1e-6;
        summary.push(format!(
            "beta {beta}: solved {solved}/20, >= 2 sign changes {crossings}/20, max signal error {worst_err:.1e}"
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    verdict(pass, format!("{}; {elapsed:.2?}", summary.join("; ")))
}

fn criterion_10() -> Verdict {
    let mut gs = 0;
    let mut rrr = 0;
    let mut gs_gap = Vec::new();
    let mut rrr_gap = Vec::new();
    for seed in 0..20u64 {
        let inst = gen_oversampled_dft::<Complex64>(32, 2, seed).unwrap();
        let p = ProjectorPair::new(&inst).unwrap();
        let init = random_init::<Complex64>(inst.m(), 20_000 + seed);
        for (alg, beta) in [(Algorithm::Gs, 0.5), (Algorithm::Rrr, 0.5)] {
            let cfg = RunConfig {
                algorithm: alg,
                beta,
                max_iters: 10_000,
                trace_every: 10_000,
                init: Init::Given(init.clone()),
                ..RunConfig::default()
            };
            let out = run_with(&inst, &p, &cfg).unwrap();
            let rel = out.final_feas_gap().unwrap() / inst.b_norm();
            let solved = out.status == RunStatus::Solved;
            match alg {
                Algorithm::Gs => {
                    gs += usize::from(solved);
                    gs_gap.push(rel);
                }
                _ => {
                    rrr += usize::from(solved);
                    rrr_gap.push(rel);
                }
            }
        }
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    verdict(
        gs < rrr,
        format!(
            "solved within 1e4 iterations: GS {gs}/20, RRR(0.5) {rrr}/20; median final gap / ||b||: GS {:.1e}, RRR {:.1e}",
            median(&mut gs_gap),
            median(&mut rrr_gap)
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("gradient identity", criterion_1),
        ("beta = 1 coincidence", criterion_2),
        ("fixed point iff solution", criterion_3),
        ("solution-set characterization", criterion_4),
        ("local convexity", criterion_5),
        ("stability", criterion_6),
        ("no escape", criterion_7),
        ("complex non-gradient", criterion_8),
        ("figure 1 reproduction", criterion_9),
        ("GS stagnation contrast", criterion_10),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let v = check();
        println!("criterion {n:>2} {:<30} {}  {}", name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
