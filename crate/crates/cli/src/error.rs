use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, flags or input file.
    #[error("{0}")]
    Validation(String),
    /// At least one state failed to solve.
    #[error("{0}")]
    Solver(String),
    /// A comparison exceeded its tolerance under --check.
    #[error("{0}")]
    Check(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl From<pslet::error::PsletError> for CliError {
    fn from(e: pslet::error::PsletError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
