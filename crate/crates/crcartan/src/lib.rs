//! Spec-file front end, reports and check suites for `crcartan-core`.

pub mod analysis;
pub mod checks;
pub mod library;
pub mod report;
pub mod spec;
pub mod tol;

use spec::{EvalError, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{err}")]
    Parse { path: String, err: ParseError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Core(#[from] crcartan_core::Error),
    #[error("bad point: {0}")]
    Point(String),
}

impl Error {
    /// 1 for unreadable or unparsable specs, 2 for domain and order errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } | Error::Parse { .. } => 1,
            _ => 2,
        }
    }
}
