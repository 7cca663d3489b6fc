//! The RRR objective `f_R`, the GS objective `f_GS`, the analytic gradient of
//! `f_R` and its finite-difference oracle, and the mixed Wirtinger derivatives
//! that separate the real and complex cases.
//!
//! ```text
//! f_R(y)  = ||y - P_A P_B y||^2 - (||y - P_A y||^2 + ||y - P_B y||^2) / 2
//! f_GS(y) = ||y - P_A P_B y||^2 / 2
//! ∇f_R(y) = P_A y + P_B y - 2 P_A P_B y        (real field, no zero coordinate)
//! ```

use nalgebra::DVector;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::projectors::ProjectorPair;
use crate::scalar::{lift, real, to_f64, Field, Scalar};

/// Mixed Wirtinger values are considered different above this gap.
pub const WIRTINGER_ASYMMETRY_TOL: f64 = 1e-10;

/// Default relative finite-difference step.
pub const FD_STEP: f64 = 1e-6;

/// Default step for the numerical Wirtinger cross-check.
pub const WIRTINGER_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveEval<S: Scalar> {
    pub f_r: S::RealField,
    pub f_gs: S::RealField,
    /// Present only for real, linear-constraint instances at points without zero coordinates.
    pub grad: Option<DVector<S>>,
    pub at: DVector<S>,
}

struct Parts<S: Scalar> {
    pa: DVector<S>,
    pb: DVector<S>,
    pab: DVector<S>,
}

fn parts<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> Parts<S> {
    let pb = p.p_b(y);
    Parts { pa: p.p_a(y), pab: p.p_a(&pb), pb }
}

fn f_r_from<S: Scalar>(y: &DVector<S>, q: &Parts<S>) -> S::RealField {
    let half: S::RealField = real(0.5);
    (y - &q.pab).norm_squared() - half * ((y - &q.pa).norm_squared() + (y - &q.pb).norm_squared())
}

fn first_zero<S: Scalar>(y: &DVector<S>) -> Option<usize> {
    y.iter().position(|v| v.clone().modulus().is_zero())
}

pub fn f_r<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> S::RealField {
    f_r_from(y, &parts(p, y))
}

pub fn f_gs<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> S::RealField {
    (y - p.p_ab(y)).norm_squared() * real::<S::RealField>(0.5)
}

/// Both objectives and, where defined, the gradient, sharing one set of projections.
pub fn evaluate<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> ObjectiveEval<S> {
    let q = parts(p, y);
    let f_r = f_r_from(y, &q);
    let f_gs = (y - &q.pab).norm_squared() * real::<S::RealField>(0.5);
    let grad = (S::FIELD == Field::Real && p.linear().is_some() && first_zero(y).is_none())
        .then(|| &q.pa + &q.pb - &q.pab * lift::<S>(2.0));
    ObjectiveEval { f_r, f_gs, grad, at: y.clone() }
}

fn check_gradient_domain<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> Result<()> {
    if S::FIELD == Field::Complex {
        return Err(Error::ComplexGradient);
    }
    p.require_linear()?;
    p.check_dim(y)?;
    match first_zero(y) {
        Some(index) => Err(Error::SignBoundary { index }),
        None => Ok(()),
    }
}

/// `∇f_R(y) = P_A y + P_B y - 2 P_A P_B y`.
pub fn grad_f_r<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> Result<DVector<S>> {
    check_gradient_domain(p, y)?;
    let q = parts(p, y);
    Ok(&q.pa + &q.pb - &q.pab * lift::<S>(2.0))
}

/// The same gradient written as `P_A (I - P_B) y + (I - P_A) P_B y`.
pub fn grad_f_r_split<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>) -> Result<DVector<S>> {
    check_gradient_domain(p, y)?;
    let pb = p.p_b(y);
    Ok(p.p_a(&(y - &pb)) + p.p_a_c(&pb))
}

/// Central differences of `f_R` with per-coordinate step `h * max(1, |y[i]|)`.
///
/// Every probe must stay inside the orthant of `y`, so `|y[i]| > 10 * step` is required.
pub fn fd_gradient<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, h: f64) -> Result<DVector<S>> {
    if S::FIELD == Field::Complex {
        return Err(Error::ComplexGradient);
    }
    if !(h > 0.0) {
        return Err(Error::param("h", format!("step must be positive, got {h}")));
    }
    p.check_dim(y)?;
    let steps: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let a = to_f64(v.clone().modulus());
            let step = h * a.max(1.0);
            if a > 10.0 * step {
                Ok(step)
            } else {
                Err(Error::ProbeTooClose { index: i, value: a, step })
            }
        })
        .collect::<Result<_>>()?;

    let mut probe = y.clone();
    let mut g = DVector::<S>::zeros(y.len());
    for (i, step) in steps.into_iter().enumerate() {
        let orig = probe[i].clone();
        probe[i] = orig.clone() + lift::<S>(step);
        let up = f_r(p, &probe);
        probe[i] = orig.clone() - lift::<S>(step);
        let down = f_r(p, &probe);
        probe[i] = orig;
        g[i] = S::from_real((up - down) / real::<S::RealField>(2.0 * step));
    }
    Ok(g)
}

/// `(∂/∂conj(y[k]) (P_A P_B y)[i], ∂/∂conj(y[i]) (P_A P_B y)[k])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerPair<S> {
    pub ik: S,
    pub ki: S,
}

impl<S: Scalar> WirtingerPair<S> {
    pub fn gap(&self) -> f64 {
        to_f64((self.ik.clone() - self.ki.clone()).modulus())
    }

    /// Whether the mixed derivatives differ, which rules out `P_A P_B` being a gradient.
    pub fn is_asymmetric(&self) -> bool {
        self.gap() > WIRTINGER_ASYMMETRY_TOL
    }
}

fn check_wirtinger_args<S: Scalar>(p: &ProjectorPair<S>, y: &DVector<S>, i: usize, k: usize) -> Result<()> {
    p.require_linear()?;
    p.check_dim(y)?;
    if i == k {
        return Err(Error::param("k", "mixed derivative needs i != k"));
    }
    for idx in [i, k] {
        if idx >= y.len() {
            return Err(Error::param("i", format!("index {idx} out of range for length {}", y.len())));
        }
        if y[idx].clone().modulus().is_zero() {
            return Err(Error::UndefinedDerivative { index: idx });
        }
    }
    Ok(())
}

/// Closed-form mixed derivatives of `P_A P_B`.
///
/// In the complex field `∂/∂conj(y[k]) (P_A P_B y)[i] = -1/2 (A A^+)[i,k] b[k] y[k] / (|y[k]| conj(y[k]))`.
/// In the real field the sign is locally constant, so both derivatives vanish.
pub fn wirtinger_asymmetry<S: Scalar>(
    p: &ProjectorPair<S>,
    y: &DVector<S>,
    i: usize,
    k: usize,
) -> Result<WirtingerPair<S>> {
    check_wirtinger_args(p, y, i, k)?;
    if S::FIELD == Field::Real {
        return Ok(WirtingerPair { ik: S::zero(), ki: S::zero() });
    }
    let col = p.require_linear()?;
    let b = p.magnitudes();
    let one = |row: usize, c: usize| {
        let yc = y[c].clone();
        let denom = S::from_real(yc.clone().modulus()) * yc.clone().conjugate();
        col.entry(row, c) * S::from_real(b[c].clone()) * yc / denom * lift::<S>(-0.5)
    };
    Ok(WirtingerPair { ik: one(i, k), ki: one(k, i) })
}

/// Central-difference estimate of the same pair: `1/2 (∂/∂re + i ∂/∂im)` in the
/// complex field, the ordinary partial derivative in the real field.
pub fn numerical_wirtinger<S: Scalar>(
    p: &ProjectorPair<S>,
    y: &DVector<S>,
    i: usize,
    k: usize,
    h: f64,
) -> Result<WirtingerPair<S>> {
    check_wirtinger_args(p, y, i, k)?;
    let component = |row: usize, var: usize| -> S {
        let eval = |delta: S| {
            let mut z = y.clone();
            z[var] += delta;
            p.p_ab(&z)[row].clone()
        };
        let two_h = lift::<S>(2.0 * h);
        let d_re = (eval(S::from_parts(h, 0.0)) - eval(S::from_parts(-h, 0.0))) / two_h.clone();
        match S::FIELD {
            Field::Real => d_re,
            Field::Complex => {
                let d_im = (eval(S::from_parts(0.0, h)) - eval(S::from_parts(0.0, -h))) / two_h;
                (d_re + S::from_parts(0.0, 1.0) * d_im) * lift::<S>(0.5)
            }
        }
    };
    Ok(WirtingerPair { ik: component(i, k), ki: component(k, i) })
}
