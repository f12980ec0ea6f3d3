use std::path::PathBuf;

use fracpade::{FemError, MeshError, OracleError, PadeError, SchemeError, SolverError};
use thiserror::Error;

/// Failure of a subcommand, split by exit code: bad input (2) versus a
/// numerical failure on valid input (3).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Prefixes the message with what was being attempted.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{what}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{what}: {m}")),
            io => io,
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        CliError::Validation(format!("mesh: {e}"))
    }
}

impl From<FemError> for CliError {
    fn from(e: FemError) -> Self {
        match e {
            FemError::Cg(_) => CliError::Solver(format!("assembly: {e}")),
            _ => CliError::Validation(format!("assembly: {e}")),
        }
    }
}

impl From<PadeError> for CliError {
    fn from(e: PadeError) -> Self {
        match e {
            PadeError::Jacobi(_) | PadeError::SingularSystem { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::ParameterOutsideUnit { .. } | SolverError::Solve { .. } | SolverError::Estimate(_) => {
                CliError::Solver(e.to_string())
            }
            SolverError::Pade(p) => p.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } | OracleError::TorusRadii | OracleError::TooManyTerms(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
