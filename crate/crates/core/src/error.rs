use thiserror::Error;

/// Errors produced by the numerics and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A precondition on the inputs (unit area, matching shapes, mean zero) failed.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A series, quadrature or residual check did not reach its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// A requested enumeration would exceed the configured size limit.
    #[error("resource limit: {0}")]
    Resource(String),
    /// An invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
