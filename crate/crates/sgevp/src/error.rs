use std::path::PathBuf;

use sgevp_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{0}: file contains no data rows")]
    EmptyFile(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed solution file: {0}")]
    Solution(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for configuration problems, 3 for bad data or files, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse { .. } | CliError::EmptyFile(_) | CliError::Io { .. } | CliError::Solution(_) => 3,
            CliError::Core(e) => match e {
                CoreError::InvalidK(_)
                | CoreError::InvalidConfig(_)
                | CoreError::InsufficientCoordinates { .. }
                | CoreError::RequiresIdentityC => 2,
                CoreError::NonFinite
                | CoreError::IndexOutOfRange { .. }
                | CoreError::DuplicateIndex(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::DegenerateData(_)
                | CoreError::SingleClass => 3,
                _ => 4,
            },
        }
    }
}
