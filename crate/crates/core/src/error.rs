use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("validation failed for `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("parse error at byte offset {offset}: {reason}")]
    Parse { offset: usize, reason: String },

    #[error("undefined reference: signal error needs a nonzero ground truth")]
    UndefinedReference,

    #[error("gradient undefined at sign boundary: coordinate {index} is zero")]
    SignBoundary { index: usize },

    #[error("gradient interpretation unavailable in complex field")]
    ComplexGradient,

    #[error("operation requires a linear (column-space) constraint projector")]
    NonlinearConstraint,

    #[error("finite-difference probe crosses a sign boundary at coordinate {index} (|y| = {value:e}, step = {step:e})")]
    ProbeTooClose { index: usize, value: f64, step: f64 },

    #[error("Wirtinger derivative undefined: coordinate {index} is zero")]
    UndefinedDerivative { index: usize },

    #[error("zero-coordinate solution, ball is empty (coordinate {index})")]
    EmptyBall { index: usize },

    #[error("ground truth x0 is required to determine d = min |A x0|")]
    MissingGroundTruth,

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: crate::Field, found: crate::Field },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::Shape { expected: expected.to_string(), found: found.to_string() }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation { field, reason: reason.into() }
    }
}
