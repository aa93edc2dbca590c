use std::fmt;

/// Failure classes, one per nonzero exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or input data (exit 1).
    Config(String),
    /// Solver or I/O failure, including interruption (exit 2).
    Numerical(String),
    /// A monitored invariant or acceptance criterion failed (exit 3).
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qlt_core::Error> for CliError {
    fn from(e: qlt_core::Error) -> Self {
        use qlt_core::Error as E;
        match e {
            E::InvalidInput(_) | E::Domain(_) | E::GridMismatch(_) => CliError::Config(e.to_string()),
            E::Numerical(_) => CliError::Numerical(e.to_string()),
            E::Cancelled => CliError::Numerical("interrupted".into()),
        }
    }
}

pub fn io_error(context: impl fmt::Display, e: impl fmt::Display) -> CliError {
    CliError::Numerical(format!("{context}: {e}"))
}
