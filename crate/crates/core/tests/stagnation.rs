use num_complex::Complex64;

use rrrkit::model::{Algorithm, RunConfig};
use rrrkit::objective::f_r;
use rrrkit::probgen::{gen_gaussian, gen_oversampled_dft};
use rrrkit::projectors::ProjectorPair;
use rrrkit::solvers::{gs_step, run_with, RunStatus};

#[test]
fn gs_stagnates_at_non_solutions() {
    let mut found = 0;
    for seed in 0..20 {
        let inst = gen_gaussian::<f64>(12, 4, seed).unwrap();
        let p = ProjectorPair::new(&inst).unwrap();
        let cfg = RunConfig { algorithm: Algorithm::Gs, max_iters: 2000, trace_every: 1000, seed, ..RunConfig::default() };
        let out = run_with(&inst, &p, &cfg).unwrap();
        if out.status != RunStatus::MaxIters {
            continue;
        }
        let y = out.state.y;
        let drift = (gs_step(&p, &y) - &y).norm();
        let gap = p.feas_gap(&y);
        assert!(drift <= 1e-12 * inst.b_norm(), "seed {seed}: drift {drift:e}");
        assert!(gap > 1e-3 * inst.b_norm());
        assert!(f_r(&p, &y) < 0.0);
        found += 1;
    }
    assert!(found >= 3, "only {found} stagnation points");
}

#[test]
fn gs_on_oversampled_dft_often_misses_the_tolerance() {
    let mut capped = 0;
    for seed in 0..6 {
        let inst = gen_oversampled_dft::<Complex64>(32, 2, seed).unwrap();
        let p = ProjectorPair::new(&inst).unwrap();
        let cfg = RunConfig { algorithm: Algorithm::Gs, max_iters: 3000, trace_every: 3000, seed, ..RunConfig::default() };
        let out = run_with(&inst, &p, &cfg).unwrap();
        if out.status == RunStatus::MaxIters {
            capped += 1;
            assert!(out.final_feas_gap().unwrap() > 1e-9 * inst.b_norm());
        }
    }
    assert!(capped >= 3, "GS reached tolerance on {} of 6", 6 - capped);
}
