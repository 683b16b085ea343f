use std::fmt;

/// Failure of a CLI command, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(demonsteer::Error),
    Io(String),
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use demonsteer::Error as E;
        match self {
            Self::Usage(_) => 2,
            Self::Core(E::Numeric(_) | E::Fit(_)) => 4,
            Self::Core(_) | Self::Io(_) | Self::Mismatch(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Mismatch(m) => write!(f, "replay mismatch: {m}"),
        }
    }
}

impl From<demonsteer::Error> for CliError {
    fn from(e: demonsteer::Error) -> Self {
        Self::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
