use thiserror::Error;

/// Malformed text input (bit strings, matrices, graph files, words).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error: {message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("generator matrix is rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("code dimension {dim} exceeds the enumeration cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("generalized distance index r = {r} out of range 1..={k}")]
    RankOutOfRange { r: usize, k: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid graph parameters: {0}")]
    InvalidParams(String),
    #[error("random regular generation failed after {restarts} restarts")]
    GenerationFailed { restarts: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("eigenvalue estimation did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
