use crate::power::Power;

/// Errors produced by the estimation library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("solver did not converge after {iterations} iterations at power {power} (last iterate {last_iterate}, gradient {gradient_norm:e})")]
    Convergence {
        power: Power,
        iterations: usize,
        last_iterate: f64,
        gradient_norm: f64,
    },

    #[error("unsupported capability: {0}")]
    Capability(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
