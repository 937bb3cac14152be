use std::fmt;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed or physically inadmissible configuration (exit 64).
    Config(String),
    /// Unreadable input or unwritable output (exit 74).
    Io(String),
    /// A numerical routine failed on admissible input (exit 70).
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 64,
            CliError::Compute(_) => 70,
            CliError::Io(_) => 74,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<euler_blowup::Error> for CliError {
    fn from(e: euler_blowup::Error) -> Self {
        use euler_blowup::Error as E;
        match e {
            E::InvalidParameter { .. } | E::InvalidField(_) | E::InsufficientCoverage { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}
