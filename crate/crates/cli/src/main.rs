use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpl_cli::{execute, Command, Overrides};

/// Dual-phase-lag heat conduction with a Padé artificial boundary.
#[derive(Parser)]
#[command(name = "dpl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Advance one configuration and write solution.csv and meta.json.
    Solve(Flags),
    /// Refinement study against the exact solution; writes convergence.csv.
    Convergence(Flags),
    /// Artificial boundary on [0, x_r] against a long Dirichlet domain.
    Compare(Flags),
    /// Check the discrete a priori bound at every time level.
    Audit(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat compatibility and support warnings as errors.
    #[arg(long)]
    strict: bool,
    /// `abc` or `dirichlet` for solve/audit; `ht`, `t` or `s` for convergence.
    #[arg(long)]
    mode: Option<String>,
    /// Number of ladder levels for convergence.
    #[arg(long)]
    levels: Option<usize>,
    /// Seed for the `random` problem.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (cmd, flags) = match cli.command {
        Cmd::Solve(f) => (Command::Solve, f),
        Cmd::Convergence(f) => (Command::Convergence, f),
        Cmd::Compare(f) => (Command::Compare, f),
        Cmd::Audit(f) => (Command::Audit, f),
    };
    let overrides = Overrides {
        out: flags.out,
        strict: flags.strict,
        mode: flags.mode,
        levels: flags.levels,
        seed: flags.seed,
    };
    match execute(cmd, flags.config.as_deref(), &overrides) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
