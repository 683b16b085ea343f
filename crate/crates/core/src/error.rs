use thiserror::Error;

/// Errors raised by the simulator, compiler and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An input object violates a structural requirement (unitarity, trace preservation, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// The request needs more memory or qubits than supported.
    #[error("resource error: {0}")]
    Resource(String),
    /// Circuit compilation failed.
    #[error("compile error: {0}")]
    Compile(String),
    /// A numerical routine failed (singular system, non-convergence).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A parameter fit could not reach its target.
    #[error("fit error: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain;
