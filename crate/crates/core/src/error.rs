use thiserror::Error;

use crate::problem::ValidationIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A denominator `1 - b_n (1 - z/z0)` of the rational approximant vanished.
    #[error("Padé approximant has a pole at z = {z} (term n = {n})")]
    Pole { n: usize, z: f64 },

    #[error("problem validation failed: {}", join_issues(.0))]
    Validation(Vec<ValidationIssue>),

    #[error("unknown problem `{name}` (available: {})", .available.join(", "))]
    UnknownProblem { name: String, available: Vec<&'static str> },

    #[error("problem `{0}` has no exact solution attached")]
    NoExactSolution(String),

    #[error("grid: {0}")]
    Grid(String),

    #[error("non-finite value produced at step {step}")]
    NonFinite { step: usize },

    #[error("singular linear system: {0}")]
    Singular(String),
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
