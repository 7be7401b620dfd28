use fockpart_core::FockError;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LangError {
    #[error("{line}:{col}: syntax error, expected {}", .expected.join(" or "))]
    Syntax { line: usize, col: usize, expected: Vec<String> },

    #[error("{line}:{col}: unbound name `{name}`")]
    UnboundName { name: String, line: usize, col: usize },

    #[error("{line}:{col}: `{name}` is already bound")]
    Rebinding { name: String, line: usize, col: usize },

    #[error("{line}:{col}: type mismatch: {message}")]
    TypeMismatch { message: String, line: usize, col: usize },

    /// `stmt` is the 1-based index of the statement the failing expression
    /// belongs to.
    #[error("statement {stmt} (line {line}): {error}")]
    Eval { stmt: usize, line: usize, error: EvalError },
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Fock(#[from] FockError),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}
