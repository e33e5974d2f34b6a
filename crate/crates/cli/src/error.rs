use std::fmt;

use bfree::Error;

/// Failures of a CLI run, grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 2).
    Config(String),
    /// Point, term or integer budget exceeded (exit 3).
    Budget(String),
    /// Window cache unreadable or written for another configuration (exit 4).
    Cache(String),
    /// Anything else, including failed self-checks (exit 1).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Cache(_) => 4,
        }
    }

    /// Library error raised while interpreting a config field.
    pub fn from_lib_in(field: &str, e: Error) -> Self {
        match CliError::from(e) {
            CliError::Config(m) => CliError::Config(format!("field `{field}`: {m}")),
            other => other,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Cache(m) => write!(f, "cache error: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::BudgetExceeded { .. } | Error::SizeOverflow { .. } | Error::Overflow(_) => CliError::Budget(msg),
            Error::Cache(_) | Error::CacheMismatch => CliError::Cache(msg),
            Error::Inconclusive(_) => CliError::Other(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Other(format!("csv: {e}"))
    }
}
