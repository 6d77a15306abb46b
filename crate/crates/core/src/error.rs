use thiserror::Error;

/// Errors produced by the simulation and analysis pipeline.
#[derive(Debug, Error)]
pub enum TlError {
    /// An input violated a mathematical precondition (non-positive energy, zero drift, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violated an invariant. Carries the offending field name.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested propagation cannot be represented on the sampling grid.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// An intensity model is unusable (e.g. identically zero).
    #[error("model error: {0}")]
    Model(String),

    /// A data file could not be parsed. Line numbers are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TlError>;

impl TlError {
    pub fn domain(msg: impl Into<String>) -> Self {
        TlError::Domain(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        TlError::Config(msg.into())
    }
    pub fn resolution(msg: impl Into<String>) -> Self {
        TlError::Resolution(msg.into())
    }
    pub fn model(msg: impl Into<String>) -> Self {
        TlError::Model(msg.into())
    }

    /// Process exit code for the CLI: 1 config, 2 numeric, 3 i/o.
    pub fn exit_code(&self) -> u8 {
        match self {
            TlError::Domain(_) | TlError::Config(_) => 1,
            TlError::Resolution(_) | TlError::Model(_) => 2,
            TlError::Parse { .. } | TlError::Io(_) => 3,
        }
    }
}
