use std::fmt;
use std::process::ExitCode;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Input = 1,
    Verification = 2,
    Precondition = 3,
    Resource = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

/// A failure that ends the command with a specific exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Input,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Precondition,
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

impl From<dilatio::Error> for CliError {
    fn from(e: dilatio::Error) -> Self {
        use dilatio::Error as E;
        let exit = match &e {
            E::ResourceLimit { .. } => Exit::Resource,
            E::NonCommuting { .. }
            | E::NotCyclic { .. }
            | E::HorizonExceeded { .. }
            | E::ChannelRejected(_)
            | E::WrongPicture(_) => Exit::Precondition,
            _ => Exit::Input,
        };
        let message = match &e {
            E::HorizonExceeded { requested, horizon } => format!(
                "horizon exceeded: rebuild with larger --steps (requested {requested}, horizon {horizon})"
            ),
            E::ResourceLimit { size, limit } => format!(
                "dilation dimension {size} exceeds the limit {limit}; raise it with --max-dim or DILATIO_MAX_DIM"
            ),
            other => other.to_string(),
        };
        Self { exit, message }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
