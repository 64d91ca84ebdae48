//! Diagnostic types shared by the whole pipeline.
//!
//! Every front-end diagnostic carries a source location so the CLI can
//! render `file:line:column: message`. Runtime errors have no location:
//! they can only arise from internal invariant violations, never from a
//! program that passed semantic analysis.

use std::fmt;

use thiserror::Error;

/// 1-based position in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: u32,
    pub column: u32,
}

impl Location {
    pub fn new(line: u32, column: u32) -> Self {
        Location { line, column }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Character-level error: input outside the accepted alphabet or a
/// malformed numeric literal.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{location}: lex error: {message}")]
pub struct LexError {
    pub location: Location,
    pub message: String,
}

/// Structural error: the token stream does not form a valid statement.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{location}: parse error: {message}")]
pub struct ParseError {
    pub location: Location,
    pub message: String,
}

/// Meaning-level error: unknown mnemonic, bad arity, index out of range,
/// alias problems, bundle conflicts and the like.
#[derive(Debug, Clone, Error, PartialEq)]
pub struct SemanticError {
    pub location: Option<Location>,
    pub message: String,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some(loc) => write!(f, "{loc}: semantic error: {}", self.message),
            None => write!(f, "semantic error: {}", self.message),
        }
    }
}

impl SemanticError {
    pub fn new(location: impl Into<Option<Location>>, message: impl Into<String>) -> Self {
        SemanticError {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// Internal invariant violation during simulation. A validated program
/// never produces one; seeing this error means a bug or a register too
/// large for the simulator.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("runtime error: {0}")]
pub struct RuntimeError(pub String);

/// Any error the source-to-IR pipeline can produce.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}
