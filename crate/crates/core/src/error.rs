use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Where in an input file a parse problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub line: Option<u64>,
    pub field: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (Some(line), Some(field)) => write!(f, "line {line}, field `{field}`"),
            (Some(line), None) => write!(f, "line {line}"),
            (None, Some(field)) => write!(f, "field `{field}`"),
            (None, None) => write!(f, "unknown location"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error("invalid `{entity}`: {message}")]
    Invariant { entity: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("instance exceeds the {solver} bound: {detail}")]
    BoundExceeded {
        solver: &'static str,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Invariant { .. } => "invariant",
            Error::Config(_) => "config",
            Error::Dimension { .. } => "dimension",
            Error::BoundExceeded { .. } => "bound_exceeded",
            Error::Io(_) => "io",
            Error::Json(_) => "parse",
        }
    }

    pub(crate) fn parse(
        line: Option<u64>,
        field: Option<&str>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            location: Location {
                line,
                field: field.map(str::to_owned),
            },
            message: message.into(),
        }
    }
}
