use relstate_core::ErrorClass;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] relstate_core::Error),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const TOLERANCE: i32 = 2;
    pub const PHYSICS: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => exit::INPUT,
            CliError::Core(e) => core_exit_code(e),
            CliError::Tolerance(_) => exit::TOLERANCE,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

pub fn core_exit_code(e: &relstate_core::Error) -> i32 {
    match e.class() {
        ErrorClass::Input => exit::INPUT,
        ErrorClass::Numerical => exit::TOLERANCE,
        ErrorClass::Physics => exit::PHYSICS,
    }
}
