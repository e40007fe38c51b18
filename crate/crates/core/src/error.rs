use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HewError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("estimation failed: {0}")]
    EstimationFailed(String),
    #[error("non-finite hessian entry at ({row}, {col})")]
    NonFiniteHessian { row: usize, col: usize },
    #[error("chain too short: {retained} retained draws, need at least {required}")]
    ChainTooShort { retained: usize, required: usize },
    #[error("bootstrap failed: {failed} of {total} refits failed")]
    BootstrapFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, HewError>;
