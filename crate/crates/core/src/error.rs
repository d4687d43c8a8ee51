use thiserror::Error;

/// Errors raised by state, ensemble and evolution constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("all amplitudes vanish; cannot normalize")]
    ZeroVector,
    #[error("direction ({0}, {1}, {2}) is not a unit vector")]
    NotUnitVector(f64, f64, f64),
    #[error("matrix is not Hermitian (residue {residue:.3e})")]
    NotHermitian { residue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("member {index} has negative probability {prob}")]
    NegativeProbability { index: usize, prob: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    ProbabilitySumNotOne { sum: f64 },
    #[error("ensemble has no members")]
    EmptyEnsemble,
    #[error("negative eigenvalue {0:.3e}")]
    NegativeEigenvalue(f64),
    #[error("trace is {0}, not 1")]
    TraceNotOne(f64),
    #[error("sample times must be ascending and start no earlier than t0 (offending time {0})")]
    NonAscendingTimes(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
