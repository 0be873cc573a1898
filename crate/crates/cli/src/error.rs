use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("numeric error: {0}")]
    Numeric(#[from] multiflow::Error),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 0 ok, 1 validation failure, 2 config or i/o error, 3 numeric error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub fn io_error(path: &str, e: std::io::Error) -> CliError {
    CliError::Io(format!("{path}: {e}"))
}
