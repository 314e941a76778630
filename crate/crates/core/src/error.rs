use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no connected placement found after {attempts} attempts")]
    ConnectivityUnreachable { attempts: usize },

    #[error("topology has no gateway node")]
    NoGateway,

    #[error("no channel satisfies the radio constraint for link {link}")]
    NoFeasibleChannel { link: usize },

    #[error("required rate must be positive, got {0}")]
    InvalidRequiredRate(f64),

    #[error("jain index is undefined for an all-zero vector")]
    AllZero,

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("search space of {size} assignments exceeds the oracle limit of {limit}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::ConnectivityUnreachable { .. }
            | Error::NoGateway
            | Error::InvalidRequiredRate(_)
            | Error::Parse { .. }
            | Error::InconsistentInputs(_) => 2,
            Error::Io { .. } | Error::Csv(_) => 3,
            Error::SearchSpaceTooLarge { .. } => 4,
            _ => 1,
        }
    }
}
