use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// `Input` and `Io` are caller-facing problems (bad data, missing files);
/// everything else signals that an analysis could not be carried out on
/// otherwise valid input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path} (near line {line}): {source}")]
    Io {
        path: PathBuf,
        line: usize,
        #[source]
        source: std::io::Error,
    },

    #[error("no rule covers `{0}`")]
    NoCoverage(String),

    #[error("degenerate similarity scores for `{0}`")]
    DegenerateScore(String),

    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error("generation failed for -{class}: produced {produced} of {requested} after {attempts} attempts")]
    GenerationExhausted {
        class: String,
        produced: usize,
        requested: usize,
        attempts: usize,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }

    /// True for errors caused by the caller's data rather than by the
    /// computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Input(_) | Error::Parse { .. } | Error::Io { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
