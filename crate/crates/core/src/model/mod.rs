//! Problem instances, iterate state, run configuration, and traces.

mod io;
mod trace;

pub use io::{deserialize_instance, deserialize_instance_as, serialize_instance};
pub use trace::{IterTrace, TraceRow, TRACE_HEADER};

use std::fmt;
use std::str::FromStr;

use approx::AbsDiffEq;
use nalgebra::{ComplexField, DMatrix, DVector, RealField};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{phase, real, to_f64, Field, Scalar};

/// Smallest admissible ratio of the extreme singular values of `A`.
pub const RANK_RATIO_TOL: f64 = 1e-10;

/// Which generator family an instance came from. `Sparse` instances use the
/// top-k constraint in place of the column-space projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Gaussian,
    OversampledDft,
    Sparse { k: usize },
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceKind::Gaussian => f.write_str("gaussian"),
            InstanceKind::OversampledDft => f.write_str("oversampled_dft"),
            InstanceKind::Sparse { k } => write!(f, "sparse:{k}"),
        }
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(InstanceKind::Gaussian),
            "oversampled_dft" => Ok(InstanceKind::OversampledDft),
            _ => {
                let k = s
                    .strip_prefix("sparse:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| Error::invalid("kind", format!("unknown instance kind {s:?}")))?;
                Ok(InstanceKind::Sparse { k })
            }
        }
    }
}

/// A phase retrieval problem `|A x0| = b`.
///
/// Instances are validated on construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S: Scalar> {
    a: DMatrix<S>,
    b: DVector<S::RealField>,
    x0: Option<DVector<S>>,
    kind: InstanceKind,
}

impl<S: Scalar> Instance<S> {
    pub fn new(
        a: DMatrix<S>,
        b: DVector<S::RealField>,
        x0: Option<DVector<S>>,
        kind: InstanceKind,
    ) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::invalid("A", format!("matrix must be non-empty, got {m}x{n}")));
        }
        if b.len() != m {
            return Err(Error::invalid("b", format!("expected length m = {m}, found {}", b.len())));
        }
        if let Some((i, _)) = a.iter().enumerate().find(|(_, v)| !(*v).clone().is_finite()) {
            return Err(Error::invalid("A", format!("non-finite entry at column-major index {i}")));
        }
        for (i, v) in b.iter().enumerate() {
            if !v.clone().is_finite() {
                return Err(Error::invalid("b", format!("non-finite entry at index {i}")));
            }
            if *v < S::RealField::zero() {
                return Err(Error::invalid("b", format!("negative magnitude {} at index {i}", to_f64(v.clone()))));
            }
        }
        if let InstanceKind::Sparse { k } = kind {
            if k == 0 || k > n {
                return Err(Error::invalid("kind", format!("sparsity {k} outside 1..={n}")));
            }
        }

        let sv = a.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        if !(smin > smax.clone() * real::<S::RealField>(RANK_RATIO_TOL)) {
            return Err(Error::invalid(
                "A",
                format!(
                    "not full column rank (sigma_min / sigma_max = {:e})",
                    to_f64(smin) / to_f64(smax)
                ),
            ));
        }

        if let Some(x0) = &x0 {
            if x0.len() != n {
                return Err(Error::invalid("x0", format!("expected length n = {n}, found {}", x0.len())));
            }
            if x0.iter().any(|v| !v.clone().is_finite()) {
                return Err(Error::invalid("x0", "non-finite entry"));
            }
            let ax = &a * x0;
            let binf = b.amax();
            let dev = ax
                .iter()
                .zip(b.iter())
                .map(|(y, bi)| (y.clone().modulus() - bi.clone()).abs())
                .fold(S::RealField::zero(), |acc, v| acc.max(v));
            let eps = S::RealField::default_epsilon() * real::<S::RealField>(16.0);
            let rel = eps.max(real(1e-12));
            if dev > rel * binf {
                return Err(Error::invalid(
                    "x0",
                    format!("|A x0| deviates from b by {:e}", to_f64(dev)),
                ));
            }
        }

        Ok(Self { a, b, x0, kind })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn field(&self) -> Field {
        S::FIELD
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.a
    }

    pub fn magnitudes(&self) -> &DVector<S::RealField> {
        &self.b
    }

    pub fn ground_truth(&self) -> Option<&DVector<S>> {
        self.x0.as_ref()
    }

    /// `A x0`, when the ground truth is known.
    pub fn true_measurements(&self) -> Option<DVector<S>> {
        self.x0.as_ref().map(|x0| &self.a * x0)
    }

    /// `min_i |(A x0)[i]|`, the radius appearing in the local analysis.
    pub fn min_true_magnitude(&self) -> Result<S::RealField> {
        let y0 = self.true_measurements().ok_or(Error::MissingGroundTruth)?;
        Ok(y0
            .iter()
            .map(|v| v.clone().modulus())
            .reduce(|a, b| a.min(b))
            .expect("m >= 1"))
    }

    pub fn b_norm(&self) -> S::RealField {
        self.b.norm()
    }
}

/// An instance whose field is only known at runtime (e.g. read from disk).
#[derive(Debug, Clone, PartialEq)]
pub enum AnyInstance {
    Real(Instance<f64>),
    Complex(Instance<Complex64>),
}

impl AnyInstance {
    pub fn field(&self) -> Field {
        match self {
            AnyInstance::Real(_) => Field::Real,
            AnyInstance::Complex(_) => Field::Complex,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            AnyInstance::Real(i) => (i.m(), i.n()),
            AnyInstance::Complex(i) => (i.m(), i.n()),
        }
    }

    pub fn kind(&self) -> InstanceKind {
        match self {
            AnyInstance::Real(i) => i.kind(),
            AnyInstance::Complex(i) => i.kind(),
        }
    }
}

impl From<Instance<f64>> for AnyInstance {
    fn from(i: Instance<f64>) -> Self {
        AnyInstance::Real(i)
    }
}

impl From<Instance<Complex64>> for AnyInstance {
    fn from(i: Instance<Complex64>) -> Self {
        AnyInstance::Complex(i)
    }
}

/// Current iterate of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterState<S: Scalar> {
    pub y: DVector<S>,
    pub t: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gs,
    Dr,
    Hio,
    Rrr,
    Raar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Gs, Algorithm::Dr, Algorithm::Hio, Algorithm::Rrr, Algorithm::Raar];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Gs => "gs",
            Algorithm::Dr => "dr",
            Algorithm::Hio => "hio",
            Algorithm::Rrr => "rrr",
            Algorithm::Raar => "raar",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param("algorithm", format!("unknown algorithm {s:?}")))
    }
}

/// Starting point of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Init<S: Scalar> {
    /// i.i.d. standard normal in the instance field, drawn from the run seed.
    RandomGaussian,
    Given(DVector<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<S: Scalar> {
    pub algorithm: Algorithm,
    pub beta: f64,
    pub max_iters: usize,
    /// Feasibility-gap threshold relative to `||b||_2`.
    pub solve_tol: f64,
    pub trace_every: usize,
    pub seed: u64,
    pub init: Init<S>,
}

impl<S: Scalar> Default for RunConfig<S> {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Rrr,
            beta: 0.5,
            max_iters: 100_000,
            solve_tol: 1e-9,
            trace_every: 1,
            seed: 0,
            init: Init::RandomGaussian,
        }
    }
}

impl<S: Scalar> RunConfig<S> {
    pub fn new(algorithm: Algorithm, beta: f64) -> Self {
        Self { algorithm, beta, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::param("beta", format!("must be positive and finite, got {}", self.beta)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        if !(self.solve_tol > 0.0) {
            return Err(Error::param("solve_tol", format!("must be positive, got {}", self.solve_tol)));
        }
        if self.trace_every == 0 {
            return Err(Error::param("trace_every", "must be at least 1"));
        }
        Ok(())
    }
}

/// Which clause of the solution-set characterization a coordinate satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionCase {
    /// `w[i] = 0`
    Zero,
    /// `sign(w[i]) = sign(y~[i])`
    Aligned,
    /// `sign(w[i]) = -sign(y~[i])` and `|w[i]| < |(A x0)[i]|`
    Opposed,
}

impl SolutionCase {
    /// 1-based clause number.
    pub fn number(self) -> u8 {
        match self {
            SolutionCase::Zero => 1,
            SolutionCase::Aligned => 2,
            SolutionCase::Opposed => 3,
        }
    }
}

/// A point corresponding to a solution together with its decomposition
/// `y = y_tilde + w`, `y_tilde` in `col(A) ∩ B`, `w` in `col(A)^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionWitness<S: Scalar> {
    pub y: DVector<S>,
    pub y_tilde: DVector<S>,
    pub w: DVector<S>,
    /// `||P_A(y) - P_B(y)||_2`
    pub residual: f64,
    pub cases: Vec<SolutionCase>,
}

/// Relative l2 error of `x_hat` against `x0` after removing the global sign
/// (real) or global phase (complex) ambiguity.
///
/// The optimal unit scalar is `phase(<x0, x_hat>)`; in the real field this is
/// the better of `+1` and `-1`.
pub fn signal_error<S: Scalar>(x_hat: &DVector<S>, x0: &DVector<S>) -> Result<S::RealField> {
    if x_hat.len() != x0.len() {
        return Err(Error::shape(x0.len(), x_hat.len()));
    }
    let norm0 = x0.norm();
    if norm0.is_zero() {
        return Err(Error::UndefinedReference);
    }
    let inner = x0.dotc(x_hat);
    let s = if inner.clone().modulus().is_zero() { S::one() } else { phase(inner) };
    let diff = x_hat - x0 * s;
    Ok(diff.norm() / norm0)
}
