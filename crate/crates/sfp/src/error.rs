//! Error type with process exit codes: 2 usage, 3 data/schema, 4 numeric.

use std::process::ExitCode as ProcessExitCode;

/// Exit code classes of the `sfp` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Usage = 2,
    Data = 3,
    Numeric = 4,
}

/// Top-level CLI error.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> ProcessExitCode {
        let code = match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Data(_) => ExitCode::Data,
            CliError::Numeric(_) => ExitCode::Numeric,
        };
        ProcessExitCode::from(code as u8)
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<sfp_core::Error> for CliError {
    fn from(err: sfp_core::Error) -> Self {
        match err {
            // Schema problems point at the input files; everything else
            // surfacing from the computation is a numeric failure.
            sfp_core::Error::Schema(m) => CliError::Data(m),
            sfp_core::Error::Domain(m) | sfp_core::Error::Numeric(m) => CliError::Numeric(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Data(err.to_string())
    }
}
