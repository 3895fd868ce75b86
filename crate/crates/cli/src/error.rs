use std::fmt;

use dpl_core::Error as CoreError;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or data; exit code 1.
    Validation(Vec<FieldError>),
    /// Non-finite values, a singular system or a violated bound; exit code 2.
    Numerical(String),
    /// Reading the config or writing artifacts; exit code 1.
    Io(anyhow::Error),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation(vec![FieldError::new(field, message)])
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(errs) => {
                write!(f, "invalid configuration")?;
                for e in errs {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonFinite { .. } | CoreError::Singular(_) | CoreError::Pole { .. } => {
                CliError::Numerical(e.to_string())
            }
            CoreError::InvalidParameter { name, .. } => CliError::field(name, e.to_string()),
            CoreError::Validation(issues) => CliError::Validation(
                issues
                    .iter()
                    .map(|i| FieldError::new("problem", i.to_string()))
                    .collect(),
            ),
            CoreError::UnknownProblem { .. } => CliError::field("problem", e.to_string()),
            CoreError::NoExactSolution(_) => CliError::field("problem", e.to_string()),
            CoreError::Grid(_) => CliError::field("grid", e.to_string()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Io(e)
    }
}
