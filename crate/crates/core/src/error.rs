use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data, e.g. a covariance matrix that is not symmetric.
    #[error("structural error: {0}")]
    Structural(String),

    /// The requested fast path does not apply to these inputs.
    #[error("unsupported path: {0}")]
    Unsupported(String),

    /// Root bracketing or another numerical procedure failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The Fock cutoff is too small for the requested accuracy.
    #[error("truncation error: {message} (minimal cutoff d = {min_cutoff:?})")]
    Truncation {
        message: String,
        min_cutoff: Option<usize>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by bad inputs rather than numerics.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Structural(_) | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
