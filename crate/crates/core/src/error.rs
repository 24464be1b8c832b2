use thiserror::Error;

/// Errors raised by the synthesis engine and its file formats.
#[derive(Debug, Error)]
pub enum PidsError {
    /// A numeric input fell outside its legal domain (non-finite setpoint, bad rate, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A breakpoint set failed validation.
    #[error("invalid breakpoints: {0}")]
    Breakpoints(String),

    /// A frequency above the representable limit for the current configuration.
    #[error("frequency {frequency_hz} Hz exceeds the limit of {limit_hz} Hz ({reason})")]
    Frequency {
        frequency_hz: f64,
        limit_hz: f64,
        reason: String,
    },

    /// Filter design failed.
    #[error("filter design error: {0}")]
    FilterDesign(String),

    /// Patch or automation configuration error, tagged with the offending field path.
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    /// Patch document rejected. `code` is a stable category name
    /// (`syntax`, `schema`, `breakpoints`, `frequency`, `range`, `automation`).
    #[error("patch error [{code}] at {path}: {message}")]
    Patch {
        code: &'static str,
        path: String,
        message: String,
    },

    /// Two sequences that must agree in length (or bin grid) did not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// Malformed or unsupported audio file.
    #[error("wav format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PidsError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        PidsError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, PidsError>;
