//! Configuration-driven front end for the `dpl` binary: parses a JSON run
//! configuration, runs one of the commands and writes CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_audit, cmd_compare, cmd_convergence, cmd_solve, dispatch, Summary};
pub use config::{BoundaryKind, Command, Overrides, Refinement, RunConfig, Z0Spec};
pub use error::{CliError, FieldError};

use std::path::Path;

use anyhow::Context;

/// Load `path` (if any), apply flag overrides and run `cmd`.
pub fn execute(cmd: Command, config: Option<&Path>, overrides: &Overrides) -> Result<Summary, CliError> {
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply(cmd, overrides)?;
    dispatch(cmd, &cfg)
}
