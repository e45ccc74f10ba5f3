//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the library.
///
/// Each variant maps to one CLI exit code through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function (e.g. `v <= 0`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A root finder or another numerical routine did not converge.
    #[error("numerical failure in {what}: residual {residual:e}")]
    Numerical { what: String, residual: f64 },
    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Parameters or data do not satisfy the admissibility conditions.
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    /// A structural invariant of the tracker was broken.
    #[error("structural invariant broken: {0}")]
    Structural(String),
    /// Initial data is malformed (non-positive volume, NaN, unbounded variation).
    #[error("invalid initial data: {0}")]
    Data(String),
    /// Configuration could not be read or parsed.
    #[error("configuration error: {0}")]
    Config(String),
    /// A runtime monitor detected a breach in strict mode.
    #[error("monitor breach: {0}")]
    MonitorBreach(String),
}

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Data(_) => 1,
            Error::Inadmissible(_) => 2,
            Error::MonitorBreach(_) | Error::Structural(_) | Error::Contract(_) => 3,
            Error::Numerical { .. } | Error::Domain(_) => 4,
        }
    }

    pub(crate) fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::Numerical {
            what: what.into(),
            residual,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
