use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] oufreq::Error),
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

impl CliError {
    /// Bad parameters map to the usage code; anything else is a failed run.
    pub fn exit_code(&self) -> i32 {
        use oufreq::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(
                E::Parameter(_) | E::InvalidInput(_) | E::Unsupported(_) | E::Capacity(_),
            ) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        }
    }
}
