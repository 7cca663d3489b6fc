//! The GS, DR, HIO, RRR and RAAR iteration maps and the run loop.
//!
//! Each map is implemented in its general form, which is valid for any
//! (possibly nonlinear) signal constraint. [`linear_form`] holds the
//! rearrangements that only hold when `P_A` is a linear projector; tests use
//! them as an independent second route.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{signal_error, Algorithm, Init, Instance, IterState, IterTrace, RunConfig, TraceRow};
use crate::objective::evaluate;
use crate::probgen::random_init;
use crate::projectors::ProjectorPair;
use crate::scalar::{lift, real, to_f64, Scalar};

/// `y ↦ P_A P_B y`
pub fn gs_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> DVector<S> {
    p.p_ab(y)
}

/// `y ↦ y + P_A(2 P_B y - y) - P_B y`
pub fn dr_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> DVector<S> {
    let pb = p.p_b(y);
    let reflected = &pb * lift::<S>(2.0) - y;
    // grouped like rrr_step so that RRR at β = 1 reproduces DR bit for bit
    y + (p.p_a(&reflected) - pb)
}

/// `y ↦ y + P_A((1 + β) P_B y - y) - β P_B y`
pub fn hio_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> DVector<S> {
    let pb = p.p_b(y);
    let inner = &pb * lift::<S>(1.0 + beta) - y;
    y + p.p_a(&inner) - pb * lift::<S>(beta)
}

/// `y ↦ y + β (P_A(2 P_B y - y) - P_B y)`
pub fn rrr_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> DVector<S> {
    let pb = p.p_b(y);
    let reflected = &pb * lift::<S>(2.0) - y;
    y + (p.p_a(&reflected) - pb) * lift::<S>(beta)
}

/// `y ↦ β (y + P_A(2 P_B y - y)) + (1 - 2β) P_B y`
pub fn raar_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> DVector<S> {
    let pb = p.p_b(y);
    let reflected = &pb * lift::<S>(2.0) - y;
    (y + p.p_a(&reflected)) * lift::<S>(beta) + pb * lift::<S>(1.0 - 2.0 * beta)
}

/// Applies one iteration of `alg`; `beta` is ignored by GS and DR.
pub fn step<S: Scalar>(alg: Algorithm, p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> DVector<S> {
    match alg {
        Algorithm::Gs => gs_step(p, y),
        Algorithm::Dr => dr_step(p, y),
        Algorithm::Hio => hio_step(p, y, beta),
        Algorithm::Rrr => rrr_step(p, y, beta),
        Algorithm::Raar => raar_step(p, y, beta),
    }
}

/// The iteration maps rewritten for a linear `P_A`.
pub mod linear_form {
    use super::*;

    /// `P_A P_B y + P_A^c P_B^c y`
    pub fn dr_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> Result<DVector<S>> {
        let col = p.require_linear()?;
        let pb = p.p_b(y);
        let pbc = y - &pb;
        use crate::projectors::Projector;
        Ok(col.project(&pb) + col.complement(&pbc))
    }

    /// `P_A P_B y + P_A^c (I - β P_B) y`
    pub fn hio_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> Result<DVector<S>> {
        use crate::projectors::Projector;
        let col = p.require_linear()?;
        let pb = p.p_b(y);
        let inner = y - &pb * lift::<S>(beta);
        Ok(col.project(&pb) + col.complement(&inner))
    }

    /// `(1 - β) y + β (P_A P_B y + P_A^c P_B^c y)`
    pub fn rrr_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> Result<DVector<S>> {
        Ok(y * lift::<S>(1.0 - beta) + dr_step(p, y)? * lift::<S>(beta))
    }

    /// `β (y + 2 P_A P_B y - P_A y - P_B y) + (1 - β) P_B y`
    pub fn raar_step<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> Result<DVector<S>> {
        use crate::projectors::Projector;
        let col = p.require_linear()?;
        let pb = p.p_b(y);
        let inner = y + col.project(&pb) * lift::<S>(2.0) - col.project(y) - &pb;
        Ok(inner * lift::<S>(beta) + pb * lift::<S>(1.0 - beta))
    }

    pub fn step<S: Scalar>(alg: Algorithm, p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> Result<DVector<S>> {
        match alg {
            Algorithm::Gs => {
                p.require_linear()?;
                Ok(super::gs_step(p, y))
            }
            Algorithm::Dr => dr_step(p, y),
            Algorithm::Hio => hio_step(p, y, beta),
            Algorithm::Rrr => rrr_step(p, y, beta),
            Algorithm::Raar => raar_step(p, y, beta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport<S: Scalar> {
    pub y_next: DVector<S>,
    /// `||y_next - y||_2`
    pub moved: f64,
    /// `||P_A(y_next) - P_B(y_next)||_2`
    pub feas_gap: f64,
}

pub fn step_report<S: Scalar>(alg: Algorithm, p: &ProjectorPair<S>, y: &DVector<S>, beta: f64) -> StepReport<S> {
    let y_next = step(alg, p, y, beta);
    let moved = to_f64((&y_next - y).norm());
    let feas_gap = to_f64(p.feas_gap(&y_next));
    StepReport { y_next, moved, feas_gap }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// The feasibility gap fell below `solve_tol * ||b||_2`.
    Solved,
    MaxIters,
    /// A non-finite iterate appeared; the state holds the last finite one.
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome<S: Scalar> {
    pub state: IterState<S>,
    pub trace: IterTrace,
    pub status: RunStatus,
}

impl<S: Scalar> RunOutcome<S> {
    pub fn final_feas_gap(&self) -> Option<f64> {
        self.trace.last().map(|r| r.feas_gap)
    }

    pub fn final_signal_error(&self) -> Option<f64> {
        self.trace.last().and_then(|r| r.signal_error)
    }
}

// The objectives square norms, so an iterate whose squared norm overflows counts as non-finite too.
fn is_finite<S: Scalar>(y: &DVector<S>) -> bool {
    y.iter().all(|v| v.clone().is_finite()) && to_f64(y.norm_squared()).is_finite()
}

fn trace_row<S: Scalar>(inst: &Instance<S>, p: &ProjectorPair<S>, y: &DVector<S>, t: usize) -> Result<TraceRow> {
    let eval = evaluate(p, y);
    let signal_error = match inst.ground_truth() {
        Some(x0) => Some(to_f64(signal_error(&p.estimate_signal(y), x0)?)),
        None => None,
    };
    Ok(TraceRow {
        t,
        f_r: to_f64(eval.f_r),
        f_gs: to_f64(eval.f_gs),
        grad_norm: eval.grad.map(|g| to_f64(g.norm())),
        feas_gap: to_f64(p.feas_gap(y)),
        signal_error,
    })
}

/// Runs `config.algorithm` on `inst`, building the projectors first.
pub fn run<S: Scalar>(inst: &Instance<S>, config: &RunConfig<S>) -> Result<RunOutcome<S>> {
    let p = ProjectorPair::new(inst)?;
    run_with(inst, &p, config)
}

/// Runs with projectors built ahead of time, so several runs can share them.
///
/// Stops as soon as `||P_A y - P_B y|| <= solve_tol * ||b||` (checked at
/// `t = 0` too) or after `max_iters` steps. Rows are recorded at every
/// multiple of `trace_every` and at the final iterate.
pub fn run_with<S: Scalar>(inst: &Instance<S>, p: &ProjectorPair<S>, config: &RunConfig<S>) -> Result<RunOutcome<S>> {
    config.validate()?;
    let mut y = match &config.init {
        Init::RandomGaussian => random_init::<S>(inst.m(), config.seed),
        Init::Given(y) => {
            p.check_dim(y)?;
            if !is_finite(y) {
                return Err(Error::param("init", "initial point has non-finite entries"));
            }
            y.clone()
        }
    };
    let tol: S::RealField = inst.b_norm() * real::<S::RealField>(config.solve_tol);
    let mut trace = IterTrace::new();
    let mut last_recorded = None;
    let mut record = |trace: &mut IterTrace, y: &DVector<S>, t: usize| -> Result<()> {
        if last_recorded != Some(t) {
            trace.push(trace_row(inst, p, y, t)?)?;
            last_recorded = Some(t);
        }
        Ok(())
    };

    record(&mut trace, &y, 0)?;
    let mut status = RunStatus::MaxIters;
    let mut t = 0;
    if p.feas_gap(&y) <= tol {
        status = RunStatus::Solved;
    } else {
        while t < config.max_iters {
            let next = step(config.algorithm, p, &y, config.beta);
            if !is_finite(&next) {
                record(&mut trace, &y, t)?;
                status = RunStatus::Diverged;
                break;
            }
            y = next;
            t += 1;
            let solved = p.feas_gap(&y) <= tol;
            if solved || t == config.max_iters || t % config.trace_every == 0 {
                record(&mut trace, &y, t)?;
            }
            if solved {
                status = RunStatus::Solved;
                break;
            }
        }
    }

    Ok(RunOutcome { state: IterState { y, t, beta: config.beta }, trace, status })
}
