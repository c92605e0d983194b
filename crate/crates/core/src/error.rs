use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed specs, violated preconditions, dimension mismatches.
    Input,
    /// The computation itself failed: breakdown, singularity, non-convergence.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not enough Jacobi coefficients: need {needed} levels, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("Lanczos breakdown at level {level}: residual norm {norm:e}")]
    Breakdown { level: usize, norm: f64 },

    #[error("moment sequence is numerically singular beyond depth {reliable_depth}")]
    HankelSingular { reliable_depth: usize },

    #[error("moment sequence is not positive definite at level {level}")]
    HankelIndefinite { level: usize },

    #[error("zero denominator at continued-fraction level {level}")]
    ZeroDenominator { level: usize },

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("solution left the lower half-plane (largest eigenvalue of Im G is {max_eigenvalue:e})")]
    OffBranch { max_eigenvalue: f64 },

    #[error("completely positive map is not nilpotent")]
    NotNilpotent,

    #[error("could not certify maximal kernel projection (spectral gap {gap:e})")]
    ProjectionUncertified { gap: f64, candidate_rank: usize },

    #[error("atom extraction failed: {0}")]
    AtomExtraction(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidMeasure(_)
            | Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::Domain(_)
            | Error::InsufficientCoefficients { .. }
            | Error::NotNilpotent
            | Error::HankelIndefinite { .. }
            | Error::Json(_) => ErrorKind::Input,
            Error::Breakdown { .. }
            | Error::HankelSingular { .. }
            | Error::ZeroDenominator { .. }
            | Error::SingularMatrix
            | Error::NonConvergence { .. }
            | Error::OffBranch { .. }
            | Error::ProjectionUncertified { .. }
            | Error::AtomExtraction(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
