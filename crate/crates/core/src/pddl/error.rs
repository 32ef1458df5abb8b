use std::fmt;

use thiserror::Error;

/// 1-based line/column of a construct in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticKind {
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("unsupported construct `{0}`")]
    UnsupportedConstruct(String),
    #[error("predicate `{predicate}` takes {expected} argument(s), got {got}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        got: usize,
    },
    #[error("variable `?{var}` is not bound in `{action}`")]
    UnboundVariable { action: String, var: String },
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("undeclared constant `{0}`")]
    UndeclaredConstant(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate parameter `?{0}`")]
    DuplicateParameter(String),
    #[error("`{construct}` is not allowed in {context}")]
    MisplacedConstruct { construct: String, context: String },
}

/// A single parse or validation finding, anchored in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct Diagnostic {
    pub pos: Pos,
    pub kind: DiagnosticKind,
}

impl Diagnostic {
    pub fn new(pos: Pos, kind: DiagnosticKind) -> Self {
        Self { pos, kind }
    }
}

/// Renders a diagnostic list one per line.
pub fn render_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Errors raised when a problem is checked against a domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("problem targets domain `{found}` but domain is `{expected}`")]
    DomainNameMismatch { expected: String, found: String },
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{predicate}` takes {expected} argument(s), got {got}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        got: usize,
    },
    #[error("object `{object}` is not of type `{expected}`")]
    TypeError { object: String, expected: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("object `{0}` is declared more than once")]
    DuplicateObject(String),
}
