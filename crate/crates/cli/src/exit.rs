use std::fmt;

use rumix::Error;

pub const OK: i32 = 0;
pub const INPUT: i32 = 2;
pub const SCHEMA: i32 = 3;
pub const INVARIANT: i32 = 4;

/// An error message paired with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: INPUT, message: message.into() }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        CliError { code: SCHEMA, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SchemaMismatch(_) | Error::WidthMismatch { .. } | Error::MissingClassColumn(_) => SCHEMA,
            Error::Invariant(_) | Error::ClassConflict(_) | Error::InvalidBit(_) => INVARIANT,
            _ => INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}
