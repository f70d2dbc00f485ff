use thiserror::Error;

/// Errors produced by every engine in the crate.
///
/// `Soundness` is reserved for outcomes a theorem rules out (a missing
/// chessboard witness, a level that is certified both in and out). It always
/// carries enough of the input to replay the failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("size guard exceeded: {what} has {size} items, limit is {limit}")]
    SizeGuard { what: String, size: u128, limit: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("soundness failure: {0}")]
    Soundness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
