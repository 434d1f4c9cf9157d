use thiserror::Error;

/// Errors produced by the statistics, null models and orderings.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("statistic is undefined for a graph without edges")]
    NoEdges,

    #[error("degenerate size: {0}")]
    DegenerateSize(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid vertex sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("problem too large ({cells} cells exceeds cap {cap}); {hint}")]
    TooLarge { cells: u128, cap: u128, hint: &'static str },

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("insufficient in-envelope edges: {m_in} (need at least 2)")]
    InsufficientEdges { m_in: u64 },

    #[error("variance formula requires N > 3 (got N = {0}); use exact enumeration")]
    EnumerationRequired(usize),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("eigen-solver failed: {0}")]
    EigenSolver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
