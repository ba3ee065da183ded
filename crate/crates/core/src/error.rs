use std::io;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Each variant maps onto one process exit code (see [`Error::exit_code`]);
/// the C ABI reuses the same numbers as status codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("frame condition violated at sample {index}: windowed energy is zero")]
    Frame { index: usize },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("threshold search did not converge: best bracket [{lo}, {hi}] gives {count} nonzeros, target {target}")]
    Search {
        lo: f64,
        hi: f64,
        count: usize,
        target: usize,
    },

    #[error("rate fit needs at least 5 positive points in range, found {0}")]
    Fit(usize),

    /// Wraps another error with the algorithm and pipeline stage that produced it.
    #[error("{algorithm} / {stage}: {source}")]
    Stage {
        algorithm: String,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn in_stage(self, algorithm: impl Into<String>, stage: &'static str) -> Self {
        Error::Stage {
            algorithm: algorithm.into(),
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 parameter, 3 format, 4 frame, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param(_) | Error::Search { .. } | Error::Fit(_) => 2,
            Error::Format(_) => 3,
            Error::Frame { .. } => 4,
            Error::Io(_) => 5,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}

impl From<hound::Error> for Error {
    fn from(err: hound::Error) -> Self {
        match err {
            hound::Error::IoError(e) => Error::Io(e),
            other => Error::Format(other.to_string()),
        }
    }
}
