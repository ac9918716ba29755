use std::fmt;
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_WITNESS: u8 = 3;

/// How a command finished when it did not error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Ran to completion but a check did not pass.
    Failed,
    /// A nonconvexity witness was found.
    Witness,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => EXIT_OK,
            Outcome::Failed => EXIT_FAILED,
            Outcome::Witness => EXIT_WITNESS,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or values; exit code 2.
    Input(String),
    /// Numerical or output failure; exit code 1.
    Failed(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Failed(_) => EXIT_FAILED,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<mse_region::Error> for CliError {
    fn from(e: mse_region::Error) -> Self {
        use mse_region::Error as E;
        match e {
            E::NotPositiveDefinite { .. } | E::NonFinite(_) => CliError::Failed(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
