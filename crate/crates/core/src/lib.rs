//! Projection algorithms for phase retrieval (GS, DR, HIO, RRR, RAAR), the
//! objective `f_R` whose gradient step reproduces RRR, and verifiers for the
//! structure of its critical points.
//!
//! The numerical core is generic over the scalar through [`Scalar`]; the
//! aliases below fix it to `f64` or `Complex64`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod model;
pub mod objective;
pub mod probgen;
pub mod projectors;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::{Field, Scalar};

pub use num_complex::Complex64;

pub type RealInstance = model::Instance<f64>;
pub type ComplexInstance = model::Instance<Complex64>;
pub type RealProjectors = projectors::ProjectorPair<f64>;
pub type ComplexProjectors = projectors::ProjectorPair<Complex64>;
pub type RealRunConfig = model::RunConfig<f64>;
pub type ComplexRunConfig = model::RunConfig<Complex64>;
pub type RealOutcome = solvers::RunOutcome<f64>;
pub type ComplexOutcome = solvers::RunOutcome<Complex64>;
