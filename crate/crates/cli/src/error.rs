use thiserror::Error;

/// Exit codes: 0 ok, 1 required check failed, 2 config error, 3 numerical
/// or I/O failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] phaseflow::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("series contains non-positive values, cannot fit a decay rate")]
    NonPositiveSeries,
    #[error("swept parameter {0} does not name a numeric leaf of the config")]
    UnknownParameter(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownParameter(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
