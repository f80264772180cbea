//! Scenario files, reports and the `deference-lab` command line.

pub mod cli;
pub mod commands;
pub mod parallel;
pub mod report;
pub mod scenario_file;

pub use commands::{execute, Command, Options, Outcome};
pub use parallel::Parallel;
pub use report::{Format, Report};
pub use scenario_file::ScenarioFile;

/// Bad files, flags or environment. Maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct InputError {
    pub message: String,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] deflab_core::Error),
}

impl RunError {
    /// 2 for input problems, 1 for failures inside the evaluation.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => commands::EXIT_INPUT,
            RunError::Evaluation(deflab_core::Error::InvalidParameter(_)) => commands::EXIT_INPUT,
            RunError::Evaluation(_) => 1,
        }
    }
}
