use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An input broke a documented precondition (shape, Hermiticity, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A parameter is outside its admissible range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An iterative or dense solver failed, or a result lost an invariant.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The request exceeds a configured memory or size budget.
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// The state has no weight in the requested symmetry sector.
    #[error("projection onto the sector vanished (norm {norm:.3e})")]
    EmptyProjection { norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
