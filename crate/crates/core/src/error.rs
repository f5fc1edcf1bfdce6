use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series error: {0}")]
    Series(String),

    #[error("quadrature did not converge: estimated error {achieved:.3e} exceeds requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid lattice config: {field}: {message}")]
    Config { field: &'static str, message: String },

    #[error("data integrity violation: {0}")]
    Integrity(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }
}
