use bandinv::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("spec file: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] bandinv::Error),
    #[error("self-test failed: {0}")]
    Mismatch(String),
}

impl CliError {
    /// 1 for usage and IO problems, 2 for input that is not a legal matrix,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(..) => 1,
            CliError::Schema(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numerical => 3,
            },
            CliError::Mismatch(_) => 3,
        }
    }
}
