use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix exponential overflow: operator norm {norm:.3e} exceeds double range")]
    Overflow { norm: f64 },

    #[error("unsupported dimension {dim} (limit {limit}); use monte_carlo instead")]
    UnsupportedDimension { dim: usize, limit: usize },

    #[error("evaluation produced a non-finite value at {context}")]
    NonFinite { context: String },

    #[error("validation failed: {axiom}: {detail}")]
    Validation { axiom: String, detail: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("unsupported direction: vector is neither in the complement nor in the nilradical (residual {residual:.3e})")]
    MixedDirection { residual: f64 },

    #[error("missing decay metadata: {0}")]
    MissingMetadata(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("derivative depth {depth} exceeds the finite-difference limit {limit}")]
    DerivativeDepth { depth: usize, limit: usize },

    #[error("group is not flagged exponential: {0}")]
    NotExponential(String),
}

pub type Result<T> = std::result::Result<T, Error>;
