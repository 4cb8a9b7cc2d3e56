use thiserror::Error;

use crate::time::Time;

#[derive(Debug, Error)]
pub enum Error {
    #[error("midi parse error at byte {offset}: {message}")]
    Midi { offset: usize, message: String },

    #[error("csv parse error on line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("monophony violation: note at {second} starts before the note at {first} ends")]
    MonophonyViolation { first: Time, second: Time },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pattern is not a subset of the dataset")]
    NotSubset,

    #[error("class '{class}' has {count} members, fewer than the {required} required")]
    ClassTooSmall {
        class: String,
        count: usize,
        required: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
