use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line-oriented or XML input could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input was well-formed but violates a domain invariant.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A pool or qrels entry names a document absent from the manifest.
    #[error("dangling reference: topic {topic_id} names unknown document {doc_id}")]
    DanglingReference { topic_id: String, doc_id: String },

    #[error("unknown measure `{given}` (valid: {valid})")]
    UnknownMeasure { given: String, valid: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }
}
