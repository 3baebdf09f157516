use std::fmt;
use std::path::{Path, PathBuf};

/// Process-level failure classes. The exit-code contract: 0 success,
/// 1 anything fixable in the inputs (validation, parsing, IO, usage),
/// 2 solver breakdowns.
#[derive(Debug)]
pub enum AppError {
    Validation(String),
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    SchemaVersion {
        found: String,
    },
    Solver(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Solver(_) => 2,
            _ => 1,
        }
    }

    pub fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        AppError::Parse {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Validation(msg) => write!(f, "{msg}"),
            AppError::Parse { path, line, msg } => {
                write!(f, "{}:{line}: {msg}", path.display())
            }
            AppError::SchemaVersion { found } => {
                write!(
                    f,
                    "unsupported model schema {found:?} (this build reads \"{}\")",
                    crate::io::model::SCHEMA
                )
            }
            AppError::Solver(msg) => write!(f, "solver failure: {msg}"),
            AppError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for AppError {}

impl From<credal_core::Error> for AppError {
    fn from(e: credal_core::Error) -> Self {
        match e {
            credal_core::Error::SolverBudgetExceeded { .. }
            | credal_core::Error::NotConverged { .. } => AppError::Solver(e.to_string()),
            _ => AppError::Validation(e.to_string()),
        }
    }
}
