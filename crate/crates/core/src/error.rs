use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("division by zero in GF({q})")]
    DivisionByZero { q: u32 },

    /// The requested computation exceeds a configured resource bound.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Fraction-free elimination produced an entry above the degree cap.
    #[error("polynomial blow-up: entry of total degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("symbolic work budget of {0} term operations exhausted")]
    WorkBudgetExceeded(u64),

    /// A proven theorem or algebraic identity failed numerically. Always a bug.
    #[error("internal assertion failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Cache(#[from] CacheError),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            Error::Internal(_) => 4,
            Error::Cache(CacheError::Io { .. }) => 1,
            _ => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("bad magic bytes in {path}")]
    BadMagic { path: PathBuf },

    #[error("unsupported cache format version {found} (expected {expected})")]
    Version { found: u8, expected: u8 },

    #[error("truncated cache file {path}: expected {expected} bytes, found {found}")]
    Truncated { path: PathBuf, expected: u64, found: u64 },

    #[error("cache header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("extension-field matrices (e = {0}) are never cached")]
    ExtensionField(u32),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
