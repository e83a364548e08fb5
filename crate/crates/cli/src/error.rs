use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("unknown parameter path `{0}`")]
    UnknownPath(String),

    #[error(transparent)]
    Core(#[from] lindtop::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{failed} of {total} sweep points failed; see the manifest")]
    PointsFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for bad input, 2 for numerical (or output) failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownPath(_) => 1,
            CliError::Core(e) if !e.is_numerical() => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
