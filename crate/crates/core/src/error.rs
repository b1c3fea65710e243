use thiserror::Error;

/// Errors produced by state construction and the decomposition pipeline.
#[derive(Debug, Error)]
pub enum QentError {
    /// Amplitude or matrix size does not match the layout's total dimension.
    #[error("size mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("unknown party label {0:?}")]
    UnknownParty(String),

    #[error("empty side of a bipartition")]
    EmptyPartition,

    #[error("layouts do not match")]
    LayoutMismatch,

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    /// A state invariant (norm, Hermiticity, positivity, trace) fails
    /// beyond tolerance.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("matrix columns are not orthonormal (residual {residual:.3e})")]
    NonIsometric { residual: f64 },

    #[error("rank {rank} out of range (max {max})")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("total dimension {dim} exceeds the cap {cap} for this operation")]
    DimensionCap { dim: usize, cap: usize },

    #[error("operation requires dims {expected:?}")]
    WrongDims { expected: Vec<usize> },

    #[error("need at least {needed} parties, layout has {actual}")]
    TooFewParties { needed: usize, actual: usize },

    #[error("unknown named state {0:?}")]
    UnknownName(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, QentError>;
