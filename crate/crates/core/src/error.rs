use thiserror::Error;

/// Errors produced across the synthesis pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: row has {found} symbols, expected {expected}")]
    RowLength {
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("line {line}: unexpected character {ch:?} in row")]
    Lexical { line: usize, ch: char },

    #[error("malformed document: {0}")]
    Structure(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("arity mismatch: expected {expected} bits, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("unsupported circuit: {0}")]
    Unsupported(String),

    #[error("invalid bit string {0:?}")]
    Bits(String),

    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that come from configured size budgets rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
