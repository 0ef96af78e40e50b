use jetlift_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Model(String),
    #[error("{0}")]
    Usage(String),
    /// The analysis ran but its preconditions do not hold for the model.
    #[error("{0}")]
    Refused(String),
}

impl CliError {
    /// 1 for analyses that refuse the model, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Refused(_) => 1,
            CliError::Core(
                Error::TorsionNonzero(_)
                | Error::Eigen(_)
                | Error::EigenvalueCrossing(..)
                | Error::DegenerateJacobian(_)
                | Error::CommutationFailure(_),
            ) => 1,
            _ => 2,
        }
    }
}
