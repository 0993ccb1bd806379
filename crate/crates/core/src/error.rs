use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("arity mismatch: expected {expected} occupied modes, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("invalid mode index: {0}")]
    Index(String),

    #[error("capacity exceeded: {needed} entries requested, limit is {limit}")]
    Capacity { needed: u128, limit: u128 },

    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("measurement oracle broke its contract: {0}")]
    OracleContract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
