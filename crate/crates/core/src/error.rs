//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("point outside domain: signed boundary distance {rho:.6e}")]
    DomainViolation { rho: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} failed to converge after {iters} iterations (residual {residual:.3e})")]
    Convergence {
        what: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),

    #[error("capacity exceeded: {n} atoms > limit {max} (subsample the ensembles)")]
    Capacity { n: usize, max: usize },

    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CoreError {
    /// Process exit code associated with this error class.
    /// 2 for configuration problems, 3 for numeric/convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CoreError::Config(_) => 2,
            CoreError::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
