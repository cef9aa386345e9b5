use thiserror::Error;

/// Command failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numerics(smolbgk::Error),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Oracle(smolbgk::Error),

    /// The verification suite ran but some check failed; the report is already printed.
    #[error("verification failed")]
    Verification,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Verification => 1,
            Failure::Numerics(_) => 2,
            Failure::Io(_) => 3,
            Failure::Oracle(_) => 4,
        }
    }
}

impl From<smolbgk::Error> for Failure {
    fn from(e: smolbgk::Error) -> Self {
        match e {
            smolbgk::Error::InvalidConfig(msg) | smolbgk::Error::Domain(msg) => Failure::Usage(msg),
            other => Failure::Numerics(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
