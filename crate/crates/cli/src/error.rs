use std::fmt;

use qubit_roof::Error;

/// Process exit status; part of the tool's stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Internal = 1,
    Parse = 2,
    NotPositive = 3,
    InvalidState = 4,
    Rank = 5,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            exit: ExitCode::Parse,
            message: message.into(),
        }
    }

    pub fn invalid_state(message: impl Into<String>) -> Self {
        Self {
            exit: ExitCode::InvalidState,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            exit: ExitCode::Internal,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::NotPositiveMap { .. } => ExitCode::NotPositive,
            Error::InvalidState(_) => ExitCode::InvalidState,
            Error::RankTooHigh { .. } => ExitCode::Rank,
            Error::OutOfRange(_) | Error::Dimensions(_) | Error::InvalidConfig(_) => ExitCode::Parse,
            Error::ZeroVector | Error::NoPsdWindow(_) | Error::AmbiguousW0 { .. } => ExitCode::Internal,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::parse(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::parse(format!("malformed JSON: {e}"))
    }
}
