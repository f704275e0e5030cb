use thiserror::Error;

use crate::moves::{MoveKind, MoveRecord};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("cannot set up the triangulation data: {0}")]
    Setup(String),
    #[error("{kind} move: {clause}")]
    PreconditionFailed { kind: MoveKind, clause: String },
    #[error("invalid flattened state: {0}")]
    InvalidState(String),
    #[error("no carried state within {budget} moves")]
    NonTermination { budget: usize, log: Vec<MoveRecord> },
}

impl EngineError {
    pub(crate) fn pre(kind: MoveKind, clause: impl Into<String>) -> EngineError {
        EngineError::PreconditionFailed {
            kind,
            clause: clause.into(),
        }
    }
}
