//! Error type shared across the crate.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid parameters or options caught before any computation starts.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `tanh(x) = x/beta` has no positive solution when `beta <= 1`.
    #[error("no positive root: tanh(x) = x/beta with beta = {beta} only has the root x = 0")]
    NoPositiveRoot { beta: f64 },

    /// The requested limit regime is inconsistent with the model parameters.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// Quadrature or iteration failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An invariant the code itself guarantees was observed broken.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
