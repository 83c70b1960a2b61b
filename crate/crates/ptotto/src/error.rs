//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by cycle construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value violated a constraint.
    #[error("validation error: {0}")]
    Validation(String),
    /// The truncated Fock basis is too small for the requested state.
    #[error("truncation error: {0}")]
    Truncation(String),
    /// An iterative procedure exhausted its step budget.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// The integrator produced a state violating trace or positivity bounds.
    #[error("stability error: {0}")]
    Stability(String),
    /// A figure of merit was requested outside its operating regime.
    #[error("regime error: {0}")]
    Regime(String),
    /// A computed quantity failed an internal consistency bound.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Failure attributed to a specific stroke of the cycle.
    #[error("stroke {stroke}: {source}")]
    Stroke {
        stroke: u8,
        #[source]
        source: Box<Error>,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tag an error with the cycle stroke it occurred in (0 = preparation of
    /// the initial thermal state, 1-4 = the four strokes).
    pub fn in_stroke(self, stroke: u8) -> Self {
        Error::Stroke {
            stroke,
            source: Box::new(self),
        }
    }

    /// Process exit code for the CLI: 2 for configuration/validation
    /// problems, 3 for numeric failures, 4 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Validation(_) | Error::Config(_) => 2,
            Error::Truncation(_)
            | Error::Convergence(_)
            | Error::Stability(_)
            | Error::Regime(_)
            | Error::Numeric(_) => 3,
            Error::Stroke { source, .. } => source.exit_code(),
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
