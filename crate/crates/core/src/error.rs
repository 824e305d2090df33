use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Raised when a quantity whose sign is fixed by the truncation lock
    /// comes out zero or negative.
    #[error("truncation violation: {0}")]
    TruncationViolation(String),

    #[error("genericity violation: {0}")]
    GenericityViolation(String),

    #[error("degenerate spectrum: cluster {cluster:?} (residual {residual:e})")]
    DegenerateSpectrum { cluster: Vec<usize>, residual: f64 },

    #[error("labeling failed: {0}")]
    Labeling(String),

    #[error("continuation failed at p = {p}: {reason}")]
    Continuation { p: f64, reason: String },

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("degenerate specialization: {0}")]
    DegenerateSpecialization(String),

    #[error("comparison failed: {0}")]
    Comparison(String),

    #[error("parse error: {0}")]
    Parse(String),
}
