use thiserror::Error;

use crate::instance::ValidationReport;
use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classes of failure; the CLI maps each class to its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or invalid input (instance file, flags, parameter ranges).
    Input,
    /// A computation refused to run because it would exceed its budget.
    Budget,
    /// A result failed an internal consistency check.
    Internal,
    /// The theorem's guarantee does not cover the requested parameter.
    Refused,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("instance failed validation: {0}")]
    InvalidInstance(ValidationReport),

    #[error("sign pattern of length {got} does not match m = {expected}")]
    PatternLength { expected: usize, got: usize },

    #[error("no support of size {s} has a full-column-rank submatrix")]
    NoFullColumnRankSupport { s: usize },

    #[error("vertex enumeration needs {required} candidate systems, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("every pseudo-extreme point has y = 0")]
    AllYZero,

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("invalid inputs for the threshold formula: {0}")]
    InvalidPstarInputs(String),

    #[error("p = {p} is outside the open interval (0, 1)")]
    PNotInRange { p: f64 },

    #[error("p = {p} is not below the certified threshold p* = {pstar}")]
    PNotBelowPstar { p: f64, pstar: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. }
            | Error::Field { .. }
            | Error::InvalidInstance(_)
            | Error::PatternLength { .. }
            | Error::PNotInRange { .. }
            | Error::InvalidPstarInputs(_) => ErrorClass::Input,
            Error::BudgetExceeded { .. } => ErrorClass::Budget,
            Error::PNotBelowPstar { .. } => ErrorClass::Refused,
            Error::Linalg(_)
            | Error::NoFullColumnRankSupport { .. }
            | Error::AllYZero
            | Error::EmptyVertexSet
            | Error::Invariant(_) => ErrorClass::Internal,
        }
    }
}
