//! Crate-wide error type and result alias.

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands with incompatible shapes reached a tensor op.
    #[error("{op}: shape mismatch between {lhs:?} and {rhs:?}")]
    ShapeMismatch {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    /// An operation received an argument that violates its contract.
    #[error("{op}: {msg}")]
    InvalidArgument { op: &'static str, msg: String },

    /// A forward value or loss became NaN/Inf.
    #[error("non-finite value produced by {op}")]
    NonFinite { op: &'static str },

    /// Run-configuration problems (unknown keys, bad values).
    #[error("config: {0}")]
    Config(String),

    /// Malformed on-disk container (bad magic, truncated payload, bad CSV).
    #[error("format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidArgument {
            op,
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 2 config, 3 IO/format, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) | Error::Format(_) => 3,
            Error::NonFinite { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
