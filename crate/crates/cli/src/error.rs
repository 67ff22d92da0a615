use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("solver error: {0}")]
    Solver(#[from] singlab_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

pub(crate) fn param_error(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("parameter '{key}': {msg}"))
}
