use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Where a config value came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Flag(String),
    /// A required key that never appeared.
    Missing,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Flag(name) => write!(f, "flag --{name}"),
            Location::Missing => f.write_str("config"),
        }
    }
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{location}: {message}")]
    Config { location: Location, message: String },
    #[error(transparent)]
    Core(#[from] nematic_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Unexpected(String),
}

impl LabError {
    pub(crate) fn config(location: &Location, message: impl Into<String>) -> Self {
        LabError::Config {
            location: location.clone(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}
