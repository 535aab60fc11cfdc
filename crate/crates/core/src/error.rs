use thiserror::Error;

use crate::situation::Digest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown {family} kind `{name}`")]
    UnknownKind { family: &'static str, name: String },

    #[error("`{kind}` expects {expected} arguments, got {got}")]
    Arity { kind: String, expected: usize, got: usize },

    #[error("action {action} is not possible in situation {situation} ({reason})")]
    NotPossible { action: String, situation: Digest, reason: String },

    #[error("{0} is not ground; use solve for non-ground queries")]
    NonGround(String),

    #[error("sub-expression {0} is not ground at evaluation time")]
    UnboundNegation(String),

    #[error("duplicate {family} name `{name}`")]
    DuplicateName { family: String, name: String },

    #[error("query syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

impl Error {
    /// Reason code attached to a `NotPossible` error.
    pub fn reason(&self) -> Option<&str> {
        match self {
            Error::NotPossible { reason, .. } => Some(reason),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
