use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("divisor is not monic (+1 or -1) in variable {var}")]
    UnsupportedDivisor { var: usize },

    #[error("operation requires exact coefficients")]
    ModeError,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate tower: p = g(x) * y^{exps:?}")]
    Degenerate { exps: Vec<u32> },

    #[error("branch undefined: all coefficients of the defining polynomial vanish")]
    BranchUndefined,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no seed vector with nonvanishing leading parts within radius {radius}")]
    NoSeed { radius: i64 },

    #[error("invalid seed {q:?} at t = {t}: normalizer {index} vanishes")]
    InvalidSeed { q: Vec<i64>, t: u64, index: usize },

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("solver failed at seed q = {q:?}, t = {t}: {reason}")]
    SolverFailed { q: Vec<i64>, t: u64, reason: String },

    #[error("region unsupported: {0}")]
    RegionUnsupported(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
