use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI must not be empty")]
    EmptyIri,
    #[error("IRI {iri:?} contains illegal character {found:?}")]
    IllegalIriChar { iri: String, found: char },
    #[error("IRI {0:?} is not absolute")]
    RelativeIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankLabel(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("rdf:langString literals need a language tag")]
    LangStringWithoutTag,
    #[error("invalid prefix label {0:?}")]
    InvalidPrefixLabel(String),
    #[error("triple subject must be an IRI or blank node")]
    LiteralSubject,
}

/// A 1-based line/column position in a source document (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurtleErrorKind {
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undefined prefix {0:?}")]
    UndefinedPrefix(String),
    #[error("IRI {0:?} is not absolute after base resolution")]
    NonAbsoluteIri(String),
    #[error("invalid term: {0}")]
    InvalidTerm(#[from] TermError),
    #[error("invalid UTF-8")]
    InvalidUtf8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct TurtleError {
    pub position: Position,
    pub kind: TurtleErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("blank node {0} cannot be canonicalized")]
    BlankNode(String),
}
