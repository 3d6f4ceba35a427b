use std::fmt;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or out-of-range parameters.
    Usage(String),
    /// Well-formed request whose data cannot be processed.
    Data(String),
    /// Anything else, including I/O.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

pub fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn data(e: impl fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

pub fn failure(e: impl fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}
