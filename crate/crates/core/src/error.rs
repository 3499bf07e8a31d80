use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("keystream collapsed: variance {variance:.3e} of the first {window} values is below {threshold:.0e}")]
    DegenerateStream {
        variance: f64,
        window: usize,
        threshold: f64,
    },

    #[error("keystream segment has {actual} values, need {expected}")]
    StreamLength { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported pixel depth: maxval {0} (only 255 is supported)")]
    UnsupportedDepth(u32),

    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u8, expected: u8 },

    #[error("truncated input: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("key file: {0}")]
    KeyFile(String),

    #[error("correlation undefined: one of the samples has zero variance")]
    UndefinedCorrelation,

    #[error("ciphertext was produced with data-sorted sub-bands and cannot be decrypted")]
    NotInvertible,
}

/// Coarse failure classes, used by the command-line front end for exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Format,
    Dimension,
    DegenerateStream,
    Other,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Other => 1,
            ErrorClass::Io => 2,
            ErrorClass::Format => 3,
            ErrorClass::Dimension => 4,
            ErrorClass::DegenerateStream => 5,
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain { what, value, expected }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::Format(_)
            | Error::UnsupportedFormat(_)
            | Error::UnsupportedDepth(_)
            | Error::BadMagic(_)
            | Error::Version { .. }
            | Error::Truncated { .. }
            | Error::KeyFile(_) => ErrorClass::Format,
            Error::Dimension(_) | Error::StreamLength { .. } => ErrorClass::Dimension,
            Error::DegenerateStream { .. } => ErrorClass::DegenerateStream,
            Error::Domain { .. } | Error::UndefinedCorrelation | Error::NotInvertible => ErrorClass::Other,
        }
    }
}
