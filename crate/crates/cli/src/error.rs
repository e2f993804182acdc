use std::path::{Path, PathBuf};

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit status of a successful command or a stable verdict.
pub const EXIT_OK: u8 = 0;
/// A check found an eigenvalue outside the region.
pub const EXIT_UNSTABLE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Format { path: String, line: usize, msg: String },

    #[error(transparent)]
    Core(#[from] dhstab::Error),

    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        use dhstab::Error as E;
        match self {
            CliError::Input(_) | CliError::Io { .. } | CliError::Format { .. } => EXIT_INPUT,
            CliError::Core(E::Validation(_) | E::Dimension(_) | E::Mode(_)) => EXIT_INPUT,
            CliError::Core(_) | CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}
