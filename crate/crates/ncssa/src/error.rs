//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid inclusion: {0}")]
    InvalidInclusion(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("support violation: {0}")]
    Support(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("unsupported shape: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
