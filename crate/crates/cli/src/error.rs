use std::io;
use std::path::PathBuf;

use corrscope_core::NaiveDate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Panel(corrscope_core::Error),

    #[error("window {window_index} (ending {end_date}): {source}")]
    Window {
        window_index: usize,
        end_date: NaiveDate,
        source: corrscope_core::Error,
    },

    #[error("null baseline: {0}")]
    Baseline(corrscope_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl Error {
    pub fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 input/config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input { .. } | Error::Config(_) | Error::Panel(_) => 2,
            Error::Window { .. } | Error::Baseline(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}
