use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max entry deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("propagator did not converge within {steps} steps (estimated error {est_error:e})")]
    Convergence { steps: usize, est_error: f64 },

    #[error("insufficient time resolution: {0}")]
    Accuracy(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration at {path}: {msg}")]
    Config { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
