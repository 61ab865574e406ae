//! Support library for the `lrc` binary: the on-disk share format and the
//! failure/repair simulator, kept in a lib so integration tests can drive
//! them directly.

pub mod share;
pub mod sim;

use thiserror::Error;

/// CLI-level errors, mapped onto process exit codes:
/// 0 success, 1 I/O or malformed files, 2 parameter rejection,
/// 3 decode failure, 4 verification failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lrc_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Format(String),

    #[error("{0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lrc_core::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::InvalidParams(_)
                | E::NotOptimalConfiguration(_)
                | E::FieldTooSmall { .. }
                | E::TooLarge { .. }
                | E::ConditionsNotMet(_)
                | E::ShapeMismatch { .. }
                | E::ZeroInverse => 2,
                E::RankDeficient { .. }
                | E::Inconsistent { .. }
                | E::GroupOverwhelmed { .. }
                | E::TooManyErasures { .. } => 3,
            },
            CliError::Io(_) | CliError::Format(_) | CliError::Json(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 4,
        }
    }
}
