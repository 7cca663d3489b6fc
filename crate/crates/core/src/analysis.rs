//! Constructive verifiers for the real-field solution set of `f_R`: solution
//! construction and membership, local convexity around a solution, stability
//! certificates, and the quadratic behaviour of `f_R` along rays.
//!
//! Everything here works in `f64` with a linear `P_A`; the statements being
//! checked do not extend to the complex field or to sparse constraints.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, SolutionCase, SolutionWitness};
use crate::objective::{f_r, grad_f_r};
use crate::projectors::ProjectorPair;
use crate::solvers::rrr_step;

/// Relative tolerance (times `||b||`) for "corresponds to a solution".
pub const SOLUTION_TOL: f64 = 1e-9;
/// Relative tolerance (times `||b||`) for constructed solutions.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Samples in the convexity ball are drawn at most this fraction of `d` from `y0`.
pub const BALL_FRACTION: f64 = 0.99;
/// Upper end of the ratio `|w[i]| / |y~[i]|` on opposed coordinates of random witnesses.
pub const OPPOSED_RATIO_MAX: f64 = 0.9;

fn unit_normal<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let n = v.norm();
        if n > 0.0 {
            return v / n;
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn require_positive_magnitudes(p: &ProjectorPair<f64>) -> Result<()> {
    match p.magnitudes().iter().position(|&v| v <= 0.0) {
        Some(i) => Err(Error::param(
            "b",
            format!("analysis needs strictly positive magnitudes, b[{i}] = 0"),
        )),
        None => Ok(()),
    }
}

fn b_norm(p: &ProjectorPair<f64>) -> f64 {
    p.magnitudes().norm()
}

/// How the orthogonal part `w` of a constructed solution is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum WSpec {
    /// `w = 0`: the solution lies in `col(A)`.
    Zero,
    /// A random direction in `col(A)^⊥`, scaled globally so the largest ratio
    /// `|w[i]| / |y~[i]|` over opposed coordinates is uniform on `(0, 0.9)`.
    Random,
    /// A caller-supplied `w`; rejected unless it is orthogonal to `col(A)` and
    /// every coordinate meets one of the three cases.
    Given(DVector<f64>),
}

/// Case of coordinate `i`, or `None` if none applies.
fn classify(y_tilde: f64, w: f64, zero_tol: f64) -> Option<SolutionCase> {
    let y = y_tilde + w;
    let same_sign = sign(y) == sign(y_tilde);
    if w.abs() <= zero_tol && (y_tilde == 0.0 || same_sign) {
        return Some(SolutionCase::Zero);
    }
    if y_tilde == 0.0 || !same_sign {
        return None;
    }
    Some(if sign(w) == sign(y_tilde) {
        SolutionCase::Aligned
    } else {
        SolutionCase::Opposed
    })
}

/// Builds `y = y~ + w` with `y~` in `col(A) ∩ B` and `w` in `col(A)^⊥`.
pub fn make_solution<R: Rng + ?Sized>(
    p: &ProjectorPair<f64>,
    y_tilde: &DVector<f64>,
    w_spec: WSpec,
    rng: &mut R,
) -> Result<SolutionWitness<f64>> {
    p.require_linear()?;
    p.check_dim(y_tilde)?;
    let bn = b_norm(p);
    let tol = CONSTRUCTION_TOL * bn.max(f64::MIN_POSITIVE);
    let b = p.magnitudes();

    let off_col = p.p_a_c(y_tilde).norm();
    if off_col > tol {
        return Err(Error::Construction(format!("y_tilde is {off_col:e} away from col(A)")));
    }
    let off_mag = y_tilde.iter().zip(b.iter()).map(|(y, b)| (y.abs() - b).powi(2)).sum::<f64>().sqrt();
    if off_mag > tol {
        return Err(Error::Construction(format!("|y_tilde| differs from b by {off_mag:e}")));
    }

    let w = match w_spec {
        WSpec::Zero => DVector::zeros(p.m()),
        WSpec::Random => {
            let dir = p.p_a_c(&unit_normal(p.m(), rng));
            if let Some(i) = (0..p.m()).find(|&i| y_tilde[i] == 0.0 && dir[i].abs() > tol) {
                return Err(Error::Construction(format!(
                    "coordinate {i} has y_tilde = 0, so no case admits a nonzero w there"
                )));
            }
            let worst = (0..p.m())
                .filter(|&i| y_tilde[i] != 0.0 && sign(dir[i]) == -sign(y_tilde[i]))
                .map(|i| dir[i].abs() / y_tilde[i].abs())
                .fold(0.0, f64::max);
            let ratio = rng.gen_range(0.0..OPPOSED_RATIO_MAX);
            let scale = if worst > 0.0 { ratio / worst } else { ratio * bn / dir.norm().max(f64::MIN_POSITIVE) };
            dir * scale
        }
        WSpec::Given(w) => {
            p.check_dim(&w)?;
            let along = p.p_a(&w).norm();
            if along > tol {
                return Err(Error::Construction(format!("w has a component {along:e} in col(A)")));
            }
            w
        }
    };

    let zero_tol = tol;
    let mut cases = Vec::with_capacity(p.m());
    for i in 0..p.m() {
        match classify(y_tilde[i], w[i], zero_tol) {
            Some(c) => cases.push(c),
            None => {
                return Err(Error::Construction(format!(
                    "coordinate {i} meets no case: y_tilde = {}, w = {}",
                    y_tilde[i], w[i]
                )))
            }
        }
    }

    let y = y_tilde + &w;
    let residual = p.feas_gap(&y);
    if residual > tol {
        return Err(Error::Construction(format!("residual {residual:e} exceeds {tol:e}")));
    }
    Ok(SolutionWitness { y, y_tilde: y_tilde.clone(), w, residual, cases })
}

/// Outcome of the case-by-case membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub is_solution: bool,
    /// `P_A(y)`
    pub y_tilde: Vec<f64>,
    /// `P_A^c(y)`
    pub w: Vec<f64>,
    /// Case met by each coordinate, `None` where none is.
    pub cases: Vec<Option<SolutionCase>>,
    /// `|| |y~| - b ||_2`
    pub magnitude_residual: f64,
    /// First coordinate meeting no case; failing that, the coordinate where
    /// `|y~|` is furthest from `b` when the magnitude test fails.
    pub first_violation: Option<usize>,
}

/// Membership at the default tolerance `1e-9 * ||b||`.
pub fn check_solution_membership(p: &ProjectorPair<f64>, y: &DVector<f64>) -> Result<MembershipReport> {
    check_solution_membership_tol(p, y, SOLUTION_TOL)
}

/// Decides whether `y` corresponds to a solution through the decomposition
/// `y = y~ + w`: `y~` must lie in `B` and every coordinate must satisfy one of
/// `w[i] = 0`, `sign(w[i]) = sign(y~[i])`, or `sign(w[i]) = -sign(y~[i])` with
/// `|w[i]| < |y~[i]|` (which equals `b[i]` on `B`).
pub fn check_solution_membership_tol(
    p: &ProjectorPair<f64>,
    y: &DVector<f64>,
    rel_tol: f64,
) -> Result<MembershipReport> {
    p.require_linear()?;
    p.check_dim(y)?;
    require_positive_magnitudes(p)?;
    let tol = rel_tol * b_norm(p);
    let y_tilde = p.p_a(y);
    let w = y - &y_tilde;
    let b = p.magnitudes();

    let cases: Vec<_> = (0..p.m()).map(|i| classify(y_tilde[i], w[i], CONSTRUCTION_TOL * b_norm(p))).collect();
    let dev: Vec<f64> = (0..p.m()).map(|i| (y_tilde[i].abs() - b[i]).abs()).collect();
    let magnitude_residual = dev.iter().map(|v| v * v).sum::<f64>().sqrt();

    let first_violation = cases.iter().position(Option::is_none).or_else(|| {
        (magnitude_residual > tol)
            .then(|| dev.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i))
            .flatten()
    });
    Ok(MembershipReport {
        is_solution: first_violation.is_none(),
        y_tilde: y_tilde.iter().copied().collect(),
        w: w.iter().copied().collect(),
        cases,
        magnitude_residual,
        first_violation,
    })
}

/// `P_A(y) = P_B(y)` within `rel_tol * ||b||`.
pub fn is_solution_direct(p: &ProjectorPair<f64>, y: &DVector<f64>, rel_tol: f64) -> bool {
    p.feas_gap(y) <= rel_tol * b_norm(p)
}

/// Results of the local convexity checks around a solution `y0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// `min_i |y0[i]|`
    pub d: f64,
    pub radius: f64,
    pub samples: usize,
    /// `max ||∇f_R(y) - P_A(y - y0)|| / (1 + ||y - y0||)`
    pub gradient_identity_error: f64,
    pub gradient_identity_ok: bool,
    /// `min <∇f(u) - ∇f(v), u - v>` over pairs in the ball.
    pub monotonicity_margin: f64,
    /// `min <∇f(u) - ∇f(v), u - v> - ||u - v||^2` over pairs with `u - v` in `col(A)`.
    pub col_margin: f64,
    /// `max |<∇f(u) - ∇f(v), u - v> - ||u - v||^2|` over the same pairs.
    pub col_deviation: f64,
    pub monotone_ok: bool,
    /// RRR with `β = 1` lands on a fixed point after one step from every sample.
    pub one_step_ok: bool,
    pub contraction: Vec<ContractionCheck>,
}

impl ConvexityReport {
    pub fn all_ok(&self) -> bool {
        self.gradient_identity_ok && self.monotone_ok && self.one_step_ok && self.contraction.iter().all(|c| c.ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCheck {
    pub beta: f64,
    /// Iterations checked across all samples.
    pub steps: usize,
    pub ok: bool,
}

/// Betas used for the contraction check.
pub const CONTRACTION_BETAS: [f64; 2] = [0.5, 1.5];
const CONTRACTION_MAX_STEPS: usize = 60;
/// Expected decreases below this fraction of `||y0||` are not checked: they
/// are lost in the rounding of the step itself.
const CONTRACTION_RESOLUTION: f64 = 1e-12;

fn ball_point<R: Rng + ?Sized>(y0: &DVector<f64>, radius: f64, rng: &mut R) -> DVector<f64> {
    let r = radius * rng.gen_range(0.0..1.0f64).powf(1.0 / y0.len() as f64);
    y0 + unit_normal(y0.len(), rng) * r
}

/// Samples `samples` points in the ball of radius `0.99 d` around `y0` and
/// checks the gradient identity, gradient monotonicity, one-step convergence
/// at `β = 1` and contraction for `β ∈ {0.5, 1.5}`.
pub fn local_convexity_report<R: Rng + ?Sized>(
    p: &ProjectorPair<f64>,
    y0: &DVector<f64>,
    samples: usize,
    rng: &mut R,
) -> Result<ConvexityReport> {
    p.require_linear()?;
    p.check_dim(y0)?;
    let (index, d) = y0
        .iter()
        .map(|v| v.abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::shape("nonempty vector", 0))?;
    if d == 0.0 {
        return Err(Error::EmptyBall { index });
    }
    let bn = b_norm(p);
    if !is_solution_direct(p, y0, SOLUTION_TOL) {
        return Err(Error::param("y0", format!("not a solution, feasibility gap {:e}", p.feas_gap(y0))));
    }
    let radius = BALL_FRACTION * d;
    let tol = 1e-10;

    let grad_model = |y: &DVector<f64>| p.p_a(&(y - y0));

    let mut grad_err = 0.0f64;
    let mut one_step_ok = true;
    let mut points = Vec::with_capacity(samples);
    for _ in 0..samples {
        let y = ball_point(y0, radius, rng);
        let g = grad_f_r(p, &y)?;
        grad_err = grad_err.max((&g - grad_model(&y)).norm() / (1.0 + (&y - y0).norm()));

        let y1 = rrr_step(p, &y, 1.0);
        let y2 = rrr_step(p, &y1, 1.0);
        let settled = (&y2 - &y1).norm() <= tol * bn && p.feas_gap(&y1) <= tol * bn;
        let moved = grad_model(&y).norm() <= tol * bn || (&y1 - &y).norm() > tol * bn;
        one_step_ok &= settled && moved;
        points.push((y, g));
    }

    let mut monotonicity_margin = f64::INFINITY;
    for pair in points.windows(2) {
        let (u, gu) = &pair[0];
        let (v, gv) = &pair[1];
        monotonicity_margin = monotonicity_margin.min((gu - gv).dot(&(u - v)));
    }

    let mut col_margin = f64::INFINITY;
    let mut col_deviation = 0.0f64;
    for _ in 0..samples.div_ceil(2) {
        let mut draw = || {
            let dir = p.p_a(&unit_normal(p.m(), rng));
            let r = radius * rng.gen_range(0.0..1.0f64);
            y0 + dir.normalize() * r
        };
        let (u, v) = (draw(), draw());
        let lhs = (grad_f_r(p, &u)? - grad_f_r(p, &v)?).dot(&(&u - &v));
        let diff = lhs - (&u - &v).norm_squared();
        col_margin = col_margin.min(diff);
        col_deviation = col_deviation.max(diff.abs());
    }
    if samples == 0 {
        monotonicity_margin = 0.0;
        col_margin = 0.0;
    }

    let resolution = CONTRACTION_RESOLUTION * y0.norm();
    let contraction = CONTRACTION_BETAS
        .iter()
        .map(|&beta| {
            let mut steps = 0;
            let mut ok = true;
            for (start, _) in &points {
                let mut y = start.clone();
                let mut dist = (&y - y0).norm();
                for _ in 0..CONTRACTION_MAX_STEPS {
                    // ||y' - y0||^2 = ||y - y0||^2 - (1 - (1 - β)^2) ||P_A(y - y0)||^2
                    let shrink = (1.0 - (1.0 - beta) * (1.0 - beta)) * grad_model(&y).norm_squared();
                    if dist - (dist * dist - shrink).max(0.0).sqrt() <= resolution {
                        break;
                    }
                    let next = rrr_step(p, &y, beta);
                    let next_dist = (&next - y0).norm();
                    steps += 1;
                    if !(next_dist < dist) {
                        ok = false;
                        break;
                    }
                    y = next;
                    dist = next_dist;
                }
            }
            ContractionCheck { beta, steps, ok }
        })
        .collect();

    let gradient_identity_ok = grad_err <= tol;
    Ok(ConvexityReport {
        d,
        radius,
        samples,
        gradient_identity_error: grad_err,
        gradient_identity_ok,
        monotonicity_margin,
        col_margin,
        col_deviation,
        monotone_ok: monotonicity_margin >= -tol && col_deviation <= tol,
        one_step_ok,
        contraction,
    })
}

/// A validated nearby solution for a point with small gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    /// `||∇f_R(y)||_2`
    pub epsilon: f64,
    /// `min_i |(A x0)[i]|`
    pub d: f64,
    /// `P_B(y)`
    pub solution_point: Vec<f64>,
    /// `P_B(y) + (1 - α) P_A^c(y)`
    pub nearby_y0: Vec<f64>,
    /// `ε / d`
    pub alpha: f64,
    /// `ε (1 + ||P_A^c(y)|| / d)`
    pub bound: f64,
    /// `||y - y0||_2`
    pub distance: f64,
    /// Present when `min_i |y[i]| >= ε`.
    pub tight: Option<TightBound>,
}

/// The `α = 0` construction, whose distance is `||P_A y - P_B y|| = ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightBound {
    pub nearby_y0: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum StabilityOutcome {
    Validated(StabilityCertificate),
    Failed { reason: String, epsilon: f64 },
}

impl StabilityOutcome {
    pub fn certificate(&self) -> Option<&StabilityCertificate> {
        match self {
            StabilityOutcome::Validated(c) => Some(c),
            StabilityOutcome::Failed { .. } => None,
        }
    }
}

/// Relative slack allowed on the tight bound, which holds with equality.
pub const TIGHT_SLACK: f64 = 1e-9;
/// Absolute slack, relative to `||b|| + ||y||`, on both distance checks.
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// Attempts the nearby-solution construction for `y`.
pub fn stability_certificate(inst: &Instance<f64>, y: &DVector<f64>) -> Result<StabilityOutcome> {
    let p = ProjectorPair::new(inst)?;
    stability_certificate_with(inst, &p, y)
}

/// As [`stability_certificate`], reusing an already built projector pair.
pub fn stability_certificate_with(
    inst: &Instance<f64>,
    p: &ProjectorPair<f64>,
    y: &DVector<f64>,
) -> Result<StabilityOutcome> {
    p.require_linear()?;
    p.check_dim(y)?;
    let ax0 = inst.true_measurements().ok_or(Error::MissingGroundTruth)?;
    let (index, d) = ax0
        .iter()
        .map(|v| v.abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::shape("nonempty vector", 0))?;
    if d == 0.0 {
        return Err(Error::EmptyBall { index });
    }
    let epsilon = grad_f_r(p, y)?.norm();
    let bn = b_norm(p);
    let tol = SOLUTION_TOL * bn;
    // projections of O(||y||) vectors carry absolute rounding of this order
    let floor = ROUNDING_FLOOR * (bn + y.norm());
    let fail = |reason: String| Ok(StabilityOutcome::Failed { reason, epsilon });

    let pb = p.p_b(y);
    let off = (p.p_a(&pb) - &pb).norm();
    if off > tol {
        return fail(format!("P_B(y) is not in col(A): ||P_A P_B y - P_B y|| = {off:e}"));
    }

    let alpha = epsilon / d;
    let pac = p.p_a_c(y);
    let nearby = &pb + &pac * (1.0 - alpha);
    if !is_solution_direct(p, &nearby, SOLUTION_TOL) {
        return fail(format!("constructed y0 has feasibility gap {:e} at alpha = {alpha:e}", p.feas_gap(&nearby)));
    }
    let bound = epsilon * (1.0 + pac.norm() / d);
    let distance = (y - &nearby).norm();
    if distance > bound + floor {
        return fail(format!("distance {distance:e} exceeds bound {bound:e}"));
    }

    let min_y = y.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let tight = if min_y >= epsilon {
        let close = &pb + &pac;
        let dist = (y - &close).norm();
        if !is_solution_direct(p, &close, SOLUTION_TOL) {
            return fail(format!("tight construction has feasibility gap {:e}", p.feas_gap(&close)));
        }
        if dist > epsilon * (1.0 + TIGHT_SLACK) + floor {
            return fail(format!("tight distance {dist:e} exceeds epsilon {epsilon:e}"));
        }
        Some(TightBound { nearby_y0: close.iter().copied().collect(), distance: dist })
    } else {
        None
    };

    Ok(StabilityOutcome::Validated(StabilityCertificate {
        epsilon,
        d,
        solution_point: pb.iter().copied().collect(),
        nearby_y0: nearby.iter().copied().collect(),
        alpha,
        bound,
        distance,
        tight,
    }))
}

/// Quadratic `a β² + b β + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, beta: f64) -> f64 {
        (self.a * beta + self.b) * beta + self.c
    }
}

/// `f_R(y - β d)` sampled beyond the sign-lock threshold, with its fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayFit {
    /// `max_i |y[i] / d[i]|`
    pub threshold: f64,
    /// Interpolant through the first three grid points.
    pub fitted: Quadratic,
    /// Coefficients from the sign-locked closed form.
    pub analytic: Quadratic,
    /// `|a_fit - a| / max(|a|, tiny)`
    pub leading_rel_err: f64,
    /// `max |f_R - fit| / |f_R|` over the grid points beyond the first three.
    pub residual: Option<f64>,
    /// `P_A(d)` vanishes (relative to `||d||`), so the restriction is affine.
    pub affine: bool,
    /// `<d, P_B(d)> = Σ b_i |d_i|`, the slope when affine.
    pub affine_slope: f64,
    pub values: Vec<(f64, f64)>,
}

impl RayFit {
    /// `f_R(y - β d) → ∞` as `β → ∞`.
    pub fn grows(&self) -> bool {
        if self.affine {
            self.affine_slope > 0.0
        } else {
            self.analytic.a > 0.0
        }
    }
}

/// Fits `f_R(y - β d)` on `beta_grid`, which must lie entirely above the
/// sign-lock threshold and contain at least three distinct values.
pub fn ray_probe(
    p: &ProjectorPair<f64>,
    y: &DVector<f64>,
    d: &DVector<f64>,
    beta_grid: &[f64],
) -> Result<RayFit> {
    p.require_linear()?;
    p.check_dim(y)?;
    p.check_dim(d)?;
    if let Some(i) = d.iter().position(|&v| v == 0.0) {
        return Err(Error::param("d", format!("direction has a zero coordinate at {i}")));
    }
    let threshold = y.iter().zip(d.iter()).map(|(a, b)| (a / b).abs()).fold(0.0, f64::max);
    if beta_grid.len() < 3 {
        return Err(Error::param("beta_grid", "need at least three points"));
    }
    if let Some(&bad) = beta_grid.iter().find(|&&b| !(b > threshold) || !b.is_finite()) {
        return Err(Error::param(
            "beta_grid",
            format!("{bad} is not above the sign-lock threshold {threshold}"),
        ));
    }
    let (b0, b1, b2) = (beta_grid[0], beta_grid[1], beta_grid[2]);
    if b0 == b1 || b1 == b2 || b0 == b2 {
        return Err(Error::param("beta_grid", "first three points must be distinct"));
    }

    let values: Vec<(f64, f64)> = beta_grid.iter().map(|&beta| (beta, f_r(p, &(y - d * beta)))).collect();
    let (f0, f1, f2) = (values[0].1, values[1].1, values[2].1);
    let d01 = (f1 - f0) / (b1 - b0);
    let d12 = (f2 - f1) / (b2 - b1);
    let a = (d12 - d01) / (b2 - b0);
    let b = d01 - a * (b0 + b1);
    let c = f0 - (a * b0 + b) * b0;
    let fitted = Quadratic { a, b, c };

    let s = p.p_b(d);
    let pad = p.p_a(d);
    let analytic = Quadratic {
        a: 0.5 * pad.norm_squared(),
        b: -d.dot(&(p.p_a(&(y + &s * 2.0)) - &s)),
        c: (y + p.p_a(&s)).norm_squared() - 0.5 * (p.p_a_c(y).norm_squared() + (y + &s).norm_squared()),
    };
    let leading_rel_err = (fitted.a - analytic.a).abs() / analytic.a.abs().max(f64::MIN_POSITIVE);
    let residual = values[3..]
        .iter()
        .map(|&(beta, f)| (f - fitted.eval(beta)).abs() / f.abs().max(f64::MIN_POSITIVE))
        .reduce(f64::max);

    Ok(RayFit {
        threshold,
        fitted,
        analytic,
        leading_rel_err,
        residual,
        affine: pad.norm() <= 1e-12 * d.norm(),
        affine_slope: d.dot(&s),
        values,
    })
}

/// Whether `d = ∇f_R(y)` meets the hypotheses of the ray lemma: no zero
/// coordinate, and either `P_A(d) ≠ 0` or `<d, P_B(y)> > 0`.
pub fn grad_direction_admissible(p: &ProjectorPair<f64>, y: &DVector<f64>) -> Result<bool> {
    let g = grad_f_r(p, y)?;
    if g.iter().any(|&v| v == 0.0) {
        return Ok(false);
    }
    let bn = b_norm(p);
    let tol = 1e-10 * bn.max(f64::MIN_POSITIVE);
    Ok(p.p_a(&g).norm() > tol || g.dot(&p.p_b(y)) > tol * bn)
}
