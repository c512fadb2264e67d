use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient data: need at least {needed} samples per group, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid scale factor {0}: must be finite and nonzero")]
    InvalidScale(f64),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid weights: sum is {sum}, expected 1")]
    InvalidWeights { sum: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("operator `{operator}` consumed {first} draws on the original inputs but {second} on the transformed inputs")]
    NondeterministicDraws {
        operator: String,
        first: u128,
        second: u128,
    },

    #[error("invalid operator matrix: {0}")]
    InvalidMatrix(String),

    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("evaluation budget of {limit} exhausted")]
    BudgetExhausted { limit: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
