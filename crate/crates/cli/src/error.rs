//! CLI error type and exit-code mapping.

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_ORACLE_FAILURE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] nopo_core::Error),
    #[error("oracle check failed: {0}")]
    OracleCheck(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INVALID_INPUT,
            CliError::Core(e) => core_exit_code(e),
            CliError::OracleCheck(_) => EXIT_ORACLE_FAILURE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "InvalidInput",
            CliError::Core(e) => e.kind(),
            CliError::OracleCheck(_) => "OracleCheckFailed",
            CliError::Io { .. } => "Io",
        }
    }

    /// Single machine-readable line for stderr.
    pub fn line(&self) -> String {
        format!(
            "error kind={} exit={} message={:?}",
            self.kind(),
            self.exit_code(),
            self.to_string()
        )
    }
}

pub fn core_exit_code(e: &nopo_core::Error) -> i32 {
    use nopo_core::Error::*;
    match e {
        Nonconvergence { .. } | SolverFailure { .. } | CutoffInsufficient { .. } => {
            EXIT_NONCONVERGENCE
        }
        InvalidParams(_)
        | PoleInput { .. }
        | DegenerateInput(_)
        | Domain(_)
        | UndefinedPhase
        | UnsupportedDetuning { .. }
        | AccuracyGuard(_) => EXIT_INVALID_INPUT,
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
