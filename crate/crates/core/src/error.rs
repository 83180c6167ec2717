use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("index {index} outside 1..={limit}")]
    Bounds { index: u64, limit: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
