use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("undefined input: {0}")]
    UndefinedInput(&'static str),

    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("budget exhausted after {0} evaluations")]
    BudgetExhausted(u64),

    #[error("unsupported schema: {0}")]
    Schema(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
