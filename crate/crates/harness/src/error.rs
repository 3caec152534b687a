use std::path::Path;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] issp_core::Error),

    #[error("I/O error: {0}")]
    Io(String),

    /// At least one inequality check failed; the message names the lemma.
    #[error("lemma check failed: {0}")]
    Lemma(String),
}

impl HarnessError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io(format!("{}: {e}", path.display()))
    }

    /// 0 success, 2 configuration, 3 failed lemma check, 4 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(issp_core::Error::Config(_)) => 2,
            HarnessError::Lemma(_) => 3,
            HarnessError::Io(_) | HarnessError::Core(issp_core::Error::Io(_)) => 4,
            HarnessError::Core(_) => 1,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}
