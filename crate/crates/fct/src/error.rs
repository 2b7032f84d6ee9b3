use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use fct_core::FctError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug)]
pub enum Error {
    Core(FctError),
    Io { path: Option<PathBuf>, source: io::Error },
    /// Malformed index-set or expansion text.
    Format(String),
    /// A cache file that cannot be used.
    Cache(CacheError),
    Csv(csv::Error),
    Usage(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CacheError {
    BadMagic,
    Version { found: u32, expected: u32 },
    Rng { found: u32, expected: u32 },
    Checksum { stored: u32, computed: u32 },
    KeyMismatch(&'static str),
    Truncated,
    Invalid(String),
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: Some(path.to_path_buf()),
            source,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Core(e) => e.fmt(f),
            Error::Io {
                path: Some(p),
                source,
            } => write!(f, "{}: {source}", p.display()),
            Error::Io { path: None, source } => source.fmt(f),
            Error::Format(msg) => write!(f, "malformed input: {msg}"),
            Error::Cache(e) => write!(f, "unusable cache file: {e}"),
            Error::Csv(e) => write!(f, "csv: {e}"),
            Error::Usage(msg) => f.write_str(msg),
        }
    }
}

impl fmt::Display for CacheError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheError::BadMagic => f.write_str("bad magic"),
            CacheError::Version { found, expected } => {
                write!(f, "format version {found}, expected {expected}")
            }
            CacheError::Rng { found, expected } => {
                write!(f, "random generator id {found}, expected {expected}")
            }
            CacheError::Checksum { stored, computed } => {
                write!(f, "checksum {stored:08x} does not match {computed:08x}")
            }
            CacheError::KeyMismatch(field) => write!(f, "{field} does not match the request"),
            CacheError::Truncated => f.write_str("truncated"),
            CacheError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Core(e) => Some(e),
            Error::Io { source, .. } => Some(source),
            Error::Csv(e) => Some(e),
            _ => None,
        }
    }
}

impl From<FctError> for Error {
    fn from(e: FctError) -> Self {
        Error::Core(e)
    }
}

impl From<io::Error> for Error {
    fn from(source: io::Error) -> Self {
        Error::Io { path: None, source }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e)
    }
}

impl From<CacheError> for Error {
    fn from(e: CacheError) -> Self {
        Error::Cache(e)
    }
}
