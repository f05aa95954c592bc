use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented invariant. `key` names the field.
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error(transparent)]
    Solver(#[from] LpError),
    /// A solver returned a status that the model structure rules out.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { key: key.into(), reason: reason.into() }
    }

    /// Solver ran out of nodes or iterations.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Solver(e) if e.is_resource())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure to read a JSON input document.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    /// Well-formed JSON with the wrong shape: unknown keys, wrong types.
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        match e.classify() {
            serde_json::error::Category::Data => InputError::Schema(e.to_string()),
            _ => InputError::Syntax { line: e.line(), column: e.column(), message: e.to_string() },
        }
    }
}

impl InputError {
    /// Re-keys a validation error under a parent field, e.g. `n` to `base.n`.
    pub(crate) fn nested(prefix: &str, err: Error) -> Self {
        match err {
            Error::Invalid { key, reason } => InputError::Invalid { key: format!("{prefix}.{key}"), reason },
            other => InputError::Invalid { key: prefix.to_string(), reason: other.to_string() },
        }
    }
}
