//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("pairing matrix is not symmetric at ({row},{col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("intersection matrix is not negative definite: {reason}")]
    NotNegativeDefinite { reason: String },

    #[error("unknown curve id `{0}`")]
    UnknownCurve(String),

    #[error("curve `{id}` has self-intersection {square} >= 0: not birationally contractible in this engine")]
    NotContractible { id: String, square: String },

    #[error("resolution graph is not log canonical")]
    NotLogCanonical,

    #[error("structure theorem violated -- input invalid: {0}")]
    StructureViolated(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("boundary point violates halfspace {index}: {description}")]
    OutsidePolytope { index: usize, description: String },

    #[error("model validation failed:\n{0}")]
    Validation(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
