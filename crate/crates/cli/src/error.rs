use std::process::ExitCode;

/// Failures reported by the command line, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid scenario or a domain error from the library (exit 2).
    #[error("{0}")]
    Domain(String),
    /// Reading or writing files failed (exit 3).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Domain(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }

    /// Domain error attributed to scenario sensor `index`.
    pub fn sensor(index: usize, e: robust_fusion::Error) -> Self {
        CliError::Domain(format!("sensor {index}: {e}"))
    }
}

impl From<robust_fusion::Error> for CliError {
    fn from(e: robust_fusion::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
