use thiserror::Error;

/// Errors produced by the solver, its diagnostics, and persistence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// A non-finite coefficient appeared during time stepping.
    #[error("blow-up at t = {t}: non-finite coefficient at mode {mode:?}")]
    BlowUp { t: f64, mode: [i32; 3] },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
