use serde::Serialize;
use thiserror::Error;

/// Stable, machine-readable error categories. The string forms are part of
/// the CLI's JSON error contract and must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Dimension,
    Validation,
    Admissibility,
    Structure,
    Construction,
    Capacity,
    Infeasible,
    Unbounded,
    Numerical,
    Io,
    Parse,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {d} outside supported range {min}..={max}")]
    Dimension { d: usize, min: usize, max: usize },

    #[error("invalid input: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("inadmissible transform: {0}")]
    Admissibility(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Dimension { .. } => ErrorCode::Dimension,
            Error::Validation(_) => ErrorCode::Validation,
            Error::Admissibility(_) => ErrorCode::Admissibility,
            Error::Structure(_) => ErrorCode::Structure,
            Error::Construction(_) => ErrorCode::Construction,
            Error::Capacity(_) => ErrorCode::Capacity,
            Error::Infeasible => ErrorCode::Infeasible,
            Error::Unbounded => ErrorCode::Unbounded,
            Error::Numerical(_) => ErrorCode::Numerical,
            Error::Io(_) => ErrorCode::Io,
            Error::Parse(_) => ErrorCode::Parse,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(vec![msg.into()])
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
