use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge: {0}")]
    NoConvergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("divergent quantity: {0}")]
    Divergent(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("hypothesis unmet: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
