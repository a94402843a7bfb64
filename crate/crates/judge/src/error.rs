use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("judgment log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] trelkit::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = JudgeError> = std::result::Result<T, E>;

impl JudgeError {
    pub(crate) fn config(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        JudgeError::Config { path: path.into(), message: message.to_string() }
    }
}
