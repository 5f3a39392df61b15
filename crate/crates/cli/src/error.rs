use std::path::PathBuf;

use wirefield_core::pipeline::StageError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {cause}", path.display())]
    Io { path: PathBuf, cause: std::io::Error },

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: unsupported version `{found}` (expected `{expected}`)", path.display())]
    Version {
        path: PathBuf,
        found: String,
        expected: &'static str,
    },

    #[error("{}: invalid `{field}`: {message}", path.display())]
    Invalid {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Stage(#[from] StageError),

    #[error(transparent)]
    Core(#[from] wirefield_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause: source,
        }
    }

    pub(crate) fn invalid(path: impl Into<PathBuf>, field: impl Into<String>, message: impl ToString) -> Self {
        Error::Invalid {
            path: path.into(),
            field: field.into(),
            message: message.to_string(),
        }
    }
}
