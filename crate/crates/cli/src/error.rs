use std::fmt;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or missing flags, unreadable config file: exit 1.
    Usage(String),
    /// The inputs are well-formed but outside the model's domain: exit 2.
    Domain(enr_design::Error),
    /// The question has no answer within the search bounds: exit 3.
    NoSolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::NoSolution(_) => 3,
        })
    }
}

impl From<enr_design::Error> for CliError {
    fn from(e: enr_design::Error) -> Self {
        if e.is_no_solution() {
            CliError::NoSolution(e.to_string())
        } else {
            CliError::Domain(e)
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::NoSolution(m) if m.starts_with("no solution") => write!(f, "{m}"),
            CliError::NoSolution(m) => write!(f, "no solution: {m}"),
        }
    }
}
