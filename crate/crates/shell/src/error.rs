//! Errors raised by the document parser and the command layer.

use std::fmt;

use thiserror::Error;

/// Where in a document a problem was found. Positions never take part in
/// structural equality, so a reprinted document compares equal to its source.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// The stage of parsing that rejected the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Reference,
    Validation,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical",
            ErrorKind::Syntax => "syntax",
            ErrorKind::Reference => "reference",
            ErrorKind::Validation => "validation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} error at {pos}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ErrorKind, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            kind,
            pos,
            message: message.into(),
        }
    }
}

/// Anything that stops a command before it can produce a report.
#[derive(Debug, Error)]
pub enum ShellError {
    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] imp_core::Error),
}

impl ShellError {
    /// 2 for bad input, 3 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            ShellError::Core(imp_core::Error::Internal(_)) => 3,
            _ => 2,
        }
    }
}
