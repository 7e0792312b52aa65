//! Error taxonomy shared by every codec and by the command-line tool.

use std::fmt;
use std::io;

/// Where in the input (or in an in-memory operation) an error was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    /// Absolute byte offset from the start of the stream.
    Byte(u64),
    /// 1-based line number in a text file.
    Line(u64),
    /// 1-based record number (pair list or binary record).
    Record(u64),
    /// 0-based row in an in-memory embedding table.
    Row(usize),
    /// No meaningful location, e.g. an operation on arguments.
    Input,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Byte(b) => write!(f, "byte offset {b}"),
            Position::Line(l) => write!(f, "line {l}"),
            Position::Record(r) => write!(f, "record {r}"),
            Position::Row(r) => write!(f, "row {r}"),
            Position::Input => f.write_str("input"),
        }
    }
}

/// Discriminant of [`Error`], convenient for matching and exit-code tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Truncated,
    BadMagic,
    DimensionMismatch,
    DuplicateWord,
    InvalidUtf8,
    UnknownFormat,
    HeaderMismatch,
    MissingWord,
    Domain,
    Io,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Truncated => "Truncated",
            ErrorKind::BadMagic => "BadMagic",
            ErrorKind::DimensionMismatch => "DimensionMismatch",
            ErrorKind::DuplicateWord => "DuplicateWord",
            ErrorKind::InvalidUtf8 => "InvalidUtf8",
            ErrorKind::UnknownFormat => "UnknownFormat",
            ErrorKind::HeaderMismatch => "HeaderMismatch",
            ErrorKind::MissingWord => "MissingWord",
            ErrorKind::Domain => "Domain",
            ErrorKind::Io => "Io",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("truncated input at {at}: {msg}")]
    Truncated { at: Position, msg: String },

    #[error("bad magic number {found:#x} at {at} (not a Leader file)")]
    BadMagic { at: Position, found: u64 },

    #[error("dimension mismatch at {at}: {msg}")]
    DimensionMismatch { at: Position, msg: String },

    #[error("duplicate word {word:?} at {at}")]
    DuplicateWord { at: Position, word: String },

    #[error("invalid UTF-8 in word at {at}")]
    InvalidUtf8 { at: Position },

    #[error("unknown format: {reason}")]
    UnknownFormat { at: Position, reason: String },

    #[error("header mismatch at {at}: {msg}")]
    HeaderMismatch { at: Position, msg: String },

    #[error("word {word:?} not found")]
    MissingWord { at: Position, word: String },

    #[error("invalid input at {at}: {msg}")]
    Domain { at: Position, msg: String },

    #[error("I/O error at {at}: {source}")]
    Io {
        at: Position,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Truncated { .. } => ErrorKind::Truncated,
            Error::BadMagic { .. } => ErrorKind::BadMagic,
            Error::DimensionMismatch { .. } => ErrorKind::DimensionMismatch,
            Error::DuplicateWord { .. } => ErrorKind::DuplicateWord,
            Error::InvalidUtf8 { .. } => ErrorKind::InvalidUtf8,
            Error::UnknownFormat { .. } => ErrorKind::UnknownFormat,
            Error::HeaderMismatch { .. } => ErrorKind::HeaderMismatch,
            Error::MissingWord { .. } => ErrorKind::MissingWord,
            Error::Domain { .. } => ErrorKind::Domain,
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    pub fn position(&self) -> Position {
        match self {
            Error::Truncated { at, .. }
            | Error::BadMagic { at, .. }
            | Error::DimensionMismatch { at, .. }
            | Error::DuplicateWord { at, .. }
            | Error::InvalidUtf8 { at }
            | Error::UnknownFormat { at, .. }
            | Error::HeaderMismatch { at, .. }
            | Error::MissingWord { at, .. }
            | Error::Domain { at, .. }
            | Error::Io { at, .. } => *at,
        }
    }

    pub(crate) fn truncated(at: Position, msg: impl Into<String>) -> Self {
        Error::Truncated {
            at,
            msg: msg.into(),
        }
    }

    pub(crate) fn dimension(at: Position, msg: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            at,
            msg: msg.into(),
        }
    }

    pub(crate) fn header(at: Position, msg: impl Into<String>) -> Self {
        Error::HeaderMismatch {
            at,
            msg: msg.into(),
        }
    }

    pub(crate) fn domain(at: Position, msg: impl Into<String>) -> Self {
        Error::Domain {
            at,
            msg: msg.into(),
        }
    }

    pub(crate) fn unknown(at: Position, reason: impl Into<String>) -> Self {
        Error::UnknownFormat {
            at,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(at: Position, source: io::Error) -> Self {
        Error::Io { at, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
