use thiserror::Error;

use crate::cone::MoreauCheck;
use crate::linalg::SignPattern;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonSquare: matrix is {rows}x{cols}, expected a square matrix")]
    NonSquare { rows: usize, cols: usize },

    #[error("DimensionMismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Empty: vectors and matrices need at least one entry")]
    Empty,

    #[error("NonFinite: input contains NaN or infinite entries")]
    NonFinite,

    #[error("SingularMatrix: pivot {pivot:e} in column {column} is below threshold {threshold:e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("SingularGenerator: generator matrix is singular (pivot {pivot:e} in column {column})")]
    SingularGenerator { column: usize, pivot: f64 },

    #[error("NormTooLarge: ||E|| = {norm} is not below 1")]
    NormTooLarge { norm: f64 },

    #[error("CertificateRejected: {check} check violated by {violation:e} (tolerance {tol:e})")]
    CertificateRejected {
        check: MoreauCheck,
        violation: f64,
        tol: f64,
    },

    #[error(
        "NumericalSingularity: iteration matrix for pattern {pattern} failed to factor \
         (condition estimate {condition_estimate:e})"
    )]
    NumericalSingularity {
        pattern: SignPattern,
        condition_estimate: f64,
    },

    #[error("ResidualCheckFailed: sign-stable iterate has residual {residual:e} above {bound:e}")]
    ResidualCheckFailed { residual: f64, bound: f64 },

    #[error("DimensionTooLarge: m = {m} exceeds the limit {max}")]
    DimensionTooLarge { m: usize, max: usize },

    #[error("NoConsistentPattern: no sign pattern passed the consistency test")]
    NoConsistentPattern,

    #[error("NotSolved: LCP status is {status}")]
    NotSolved { status: String },

    #[error("BadParam: {0}")]
    BadParam(String),

    #[error("InstanceFormat: {0}")]
    InstanceFormat(String),

    #[error("Io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
