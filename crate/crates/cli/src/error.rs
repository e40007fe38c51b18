use hew_core::HewError;
use thiserror::Error;

/// CLI failures, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Estimation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Estimation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<HewError> for CliError {
    fn from(e: HewError) -> Self {
        let msg = e.to_string();
        match e {
            HewError::InvalidParameter { .. }
            | HewError::Domain(_)
            | HewError::Io(_)
            | HewError::InvalidSample(_)
            | HewError::InvalidConfig(_) => CliError::Input(msg),
            HewError::EstimationFailed(_)
            | HewError::NonFiniteHessian { .. }
            | HewError::ChainTooShort { .. }
            | HewError::BootstrapFailed { .. } => CliError::Estimation(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
