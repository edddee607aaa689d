use std::path::PathBuf;

use crate::diagnostics::RunLog;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sample index {index} out of range (valid range {start}..{end})")]
    IndexOutOfRange {
        index: usize,
        start: usize,
        end: usize,
    },

    #[error("invalid partition: cannot split {n} samples over {workers} workers")]
    InvalidPartition { n: usize, workers: usize },

    #[error("operation not supported: {0}")]
    Unsupported(&'static str),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("linear system is singular or ill-posed: {0}")]
    Singular(String),

    #[error("iterate diverged at update {update} (|w|_inf > {threshold:e})")]
    Diverged {
        update: u64,
        threshold: f64,
        partial: Box<RunLog>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::EmptyDataset | Error::Io { .. } => 2,
            Error::Diverged { .. } => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
