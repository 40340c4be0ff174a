use thiserror::Error;

/// Usage or domain violation.
pub const EXIT_USAGE: i32 = 64;
/// Unreadable or malformed input file.
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Domain(#[from] exclusion_lab::Error),

    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),

    #[error("cannot write {0}: {1}")]
    Write(String, std::io::Error),

    #[error("invalid input: {0}")]
    Format(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Domain(_) => EXIT_USAGE,
            CliError::Io(..) | CliError::Write(..) | CliError::Format(_) => EXIT_DATA,
        }
    }
}
