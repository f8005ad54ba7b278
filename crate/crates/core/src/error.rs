use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument was syntactically valid but outside the supported range.
    #[error("range error: {0}")]
    Range(String),

    /// The request would exceed a configured memory or enumeration budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An exponent threshold cannot be met even at lambda = 1.
    #[error("threshold unachievable: best attainable exponent is {max_e} at lambda = 1")]
    Unachievable { max_e: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
