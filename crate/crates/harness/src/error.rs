use bhl_core::Error as CoreError;
use thiserror::Error;

/// Process exit status of the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationFailed = 1,
    ConfigError = 2,
    NumericalFailure = 3,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

impl HarnessError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_status(&self) -> ExitStatus {
        match self {
            Self::Config(_) | Self::Io { .. } => ExitStatus::ConfigError,
            Self::Verification(_) => ExitStatus::VerificationFailed,
            Self::Core(e) => core_status(e),
        }
    }
}

fn core_status(e: &CoreError) -> ExitStatus {
    match e {
        CoreError::StepFailed { source, .. } => core_status(source),
        CoreError::NoConvergence { .. } | CoreError::NonFinite(_) | CoreError::NotStabilized { .. } => {
            ExitStatus::NumericalFailure
        }
        _ => ExitStatus::ConfigError,
    }
}
