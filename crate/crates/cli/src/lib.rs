//! Library side of the `entkit` binary: the state-file format, report
//! wrappers, and the command implementations. Kept as a library so the
//! integration and acceptance suites can drive the exact code paths the
//! binary runs.

pub mod commands;
pub mod io;

/// Process exit codes, a stable contract.
pub mod exit_codes {
    pub const OK: i32 = 0;
    /// Unreadable, unparsable, or invalid input; bad parameters.
    pub const INPUT_ERROR: i32 = 2;
    /// A resource cap refused the request (dimension, trials, tensor power).
    pub const RESOURCE_CAP: i32 = 3;
}

/// Error carrying the exit code the binary should report.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: exit_codes::INPUT_ERROR,
            message: message.into(),
        }
    }

    pub fn cap(message: impl Into<String>) -> Self {
        Self {
            code: exit_codes::RESOURCE_CAP,
            message: message.into(),
        }
    }
}

impl From<entkit::Error> for CliError {
    fn from(err: entkit::Error) -> Self {
        match err {
            entkit::Error::CapExceeded(_) => Self::cap(err.to_string()),
            _ => Self::input(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::input(format!("io error: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
