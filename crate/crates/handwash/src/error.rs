use std::path::{Path, PathBuf};

use handwash_core::windowing::WindowError;

/// Failure of one pipeline stage, classified for the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {message}")]
    Data { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    Internal { stage: &'static str, message: String },
    #[error("{stage}: {path}: {source}")]
    Io {
        stage: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(stage: &'static str, err: impl std::fmt::Display) -> Self {
        Error::Data {
            stage,
            message: err.to_string(),
        }
    }

    pub fn internal(stage: &'static str, err: impl std::fmt::Display) -> Self {
        Error::Internal {
            stage,
            message: err.to_string(),
        }
    }

    pub fn io(stage: &'static str, path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            stage,
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for configuration problems, 2 for bad input data, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data { .. } => 2,
            Error::Io { stage, .. } if stage.starts_with("write") => 3,
            Error::Io { .. } => 2,
            Error::Internal { .. } => 3,
        }
    }
}

/// Classifies a core error raised while running `stage`. Window
/// configuration errors are config errors; everything else is data.
pub fn from_core(stage: &'static str, err: impl Into<handwash_core::Error>) -> Error {
    let err = err.into();
    match &err {
        handwash_core::Error::Window(WindowError::InvalidConfig(m)) => Error::Config(m.clone()),
        handwash_core::Error::Eval(handwash_core::evaluation::EvalError::Window(WindowError::InvalidConfig(m))) => {
            Error::Config(m.clone())
        }
        _ => Error::data(stage, err),
    }
}
