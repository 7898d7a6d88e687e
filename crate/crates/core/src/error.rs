use std::path::PathBuf;

use thiserror::Error;

/// Every failure the solver library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {0} outside the supported range 1..=8")]
    UnsupportedDegree(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("configuration is invalid:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),

    #[error("singular Jacobian at step {step}, Newton iteration {iteration}: {detail}")]
    SingularJacobian {
        step: usize,
        iteration: usize,
        detail: String,
    },

    #[error(
        "Newton did not converge at step {step} (t = {time}): squared update norm {last_update:.3e} after {iterations} iterations"
    )]
    NewtonDiverged {
        step: usize,
        time: f64,
        iterations: usize,
        last_update: f64,
    },

    #[error("no steady state after {steps} steps: last change {last_change:.3e} above {tolerance:.3e}")]
    NotSteady {
        steps: usize,
        last_change: f64,
        tolerance: f64,
    },

    #[error("non-finite state at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for solver failures (as opposed to bad input or configuration).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SingularJacobian { .. }
                | Error::NewtonDiverged { .. }
                | Error::NonFinite { .. }
                | Error::NotSteady { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
