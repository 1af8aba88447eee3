use thiserror::Error;

/// Errors surfaced by every layer of the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("scalars live in different quadratic fields: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("player {player}: measure of the whole cake is {total}, expected D = {expected}")]
    Normalization {
        player: usize,
        total: String,
        expected: String,
    },
    #[error("pieces of players {first} and {second} overlap on [{lo}, {hi})")]
    Overlap {
        first: usize,
        second: usize,
        lo: String,
        hi: String,
    },
    #[error("cake not covered on [{lo}, {hi})")]
    Coverage { lo: String, hi: String },
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
    #[error("protocol failure: {0}")]
    Protocol(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
