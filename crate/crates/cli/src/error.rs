use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}:{line}: shape has zero size after centring")]
    DegenerateShape { path: PathBuf, line: usize },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{failures} of {runs} replicates failed in cell k={k}, m={m}; last error: {last}")]
    TooManyFailures {
        k: usize,
        m: usize,
        failures: usize,
        runs: usize,
        last: String,
    },
    #[error(transparent)]
    Numeric(#[from] manifold_mom::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration errors, 3 for bad input data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Parse { .. } | Self::DegenerateShape { .. } | Self::Read { .. } => 3,
            _ => 1,
        }
    }
}
