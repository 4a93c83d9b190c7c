//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the regime an operation is defined for.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A special function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value {value} produced at cell {cell:?}")]
    Construction { cell: Vec<usize>, value: f64 },

    /// The directional derivative norm along some quadrature direction
    /// vanished relative to the full gradient norm.
    #[error(
        "degenerate direction {direction:?}: directional norm {norm:e} vs gradient norm {gradient_norm:e}"
    )]
    DegenerateDirection {
        direction: Vec<f64>,
        norm: f64,
        gradient_norm: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("malformed grid file: {0}")]
    MalformedGrid(String),

    #[error("solver failed after {iterations} iterations: {message}")]
    Solver {
        message: String,
        iterations: usize,
        energy: f64,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used in the CLI error object.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter_error",
            Error::Domain(_) => "domain_error",
            Error::Construction { .. } => "construction_error",
            Error::DegenerateDirection { .. } => "degenerate_direction",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::MalformedGrid(_) => "malformed_grid",
            Error::Solver { .. } => "solver_error",
            Error::Usage(_) => "usage_error",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
