use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("relation violated: {0}")]
    RelationViolated(String),
    #[error("element {0} is not in the positive monoid")]
    NotPositive(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture `{id}`: {msg}")]
    Fixture { id: String, msg: String },
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, HeckeError>;
