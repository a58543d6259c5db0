use periodist_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 1.
    #[error("input error: {0}")]
    Input(String),
    /// A mathematical condition failed; exit code 2.
    #[error("{0}")]
    Math(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::WitnessViolation { .. }
            | Error::CertificateViolation { .. }
            | Error::InsufficientDecay(_)
            | Error::BezoutResidual { .. } => CliError::Math(e.to_string()),
            Error::DimensionMismatch { .. }
            | Error::InvalidInput(_)
            | Error::SingularBasis { .. }
            | Error::InfiniteSupport
            | Error::SampleCount { .. } => CliError::Input(e.to_string()),
        }
    }
}
