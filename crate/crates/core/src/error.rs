use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("laguerre degree {0} exceeds the recurrence depth guard")]
    DegreeTooLarge(usize),

    #[error("argument must be finite, got {0}")]
    NonFinite(f64),

    #[error("laguerre parameter must satisfy mu > -1, got {0}")]
    InvalidLaguerreParameter(f64),

    #[error("quadrature order {0} outside 1..=512")]
    InvalidOrder(usize),

    #[error("gauss-laguerre root finder did not converge for order {order} (root {index})")]
    RootNotConverged { order: usize, index: usize },

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("{what} must be non-negative and finite, got {value}")]
    Negative { what: &'static str, value: f64 },

    #[error("requested n_max {0} exceeds the table-size guard of 10000")]
    TableTooLarge(usize),

    #[error("coefficient table tail mass {tail_mass:e} exceeds the allowed {limit:e}")]
    TailTooLarge { tail_mass: f64, limit: f64 },

    #[error("grid half-width {have} does not cover the required {need}")]
    GridTooSmall { have: f64, need: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
