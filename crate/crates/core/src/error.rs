use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a precondition (non-positive mass, closed channel, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure failed to reach its tolerance.
    #[error("numerical error: {message} (error estimate {estimate:e})")]
    Numerical { message: String, estimate: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, estimate: f64) -> Self {
        Error::Numerical {
            message: msg.into(),
            estimate,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
