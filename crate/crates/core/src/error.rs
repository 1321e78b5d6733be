use thiserror::Error;

use crate::formula::{ClauseId, VariableId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable {0} has already been eliminated")]
    VariableEliminated(VariableId),

    #[error("variable {0} does not belong to the formula")]
    UnknownVariable(VariableId),

    #[error("variable {0} cannot be linked to one of its own literals")]
    SelfLink(VariableId),

    #[error("clause {0} does not exist")]
    UnknownClause(ClauseId),

    #[error("rule {rule} is not applicable: {reason}")]
    NotApplicable { rule: String, reason: String },

    #[error("model assigns {got} variables but the formula has {expected}")]
    PartialModel { expected: usize, got: usize },

    #[error("clause {clause} has {len} literals, expected 3")]
    NotThreeLiteral { clause: ClauseId, len: usize },

    #[error("variable {var} has degree {degree}, at most 2 is required")]
    DegreeTooHigh { var: VariableId, degree: usize },

    #[error("variable {0} occurs with both polarities")]
    MixedPolarity(VariableId),

    #[error("clause {0} still contains constant tokens")]
    ConstantsPresent(ClauseId),

    #[error("invalid subclause: {0}")]
    InvalidSubclause(String),

    #[error("invalid branching vector: {0}")]
    InvalidBranchVector(String),

    #[error("catalog line {line}: {message}")]
    Catalog { line: usize, message: String },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("formula has {vars} variables, enumeration is limited to {limit}")]
    TooManyVariables { vars: usize, limit: usize },

    #[error("infeasible generator configuration: {0}")]
    InfeasibleConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
