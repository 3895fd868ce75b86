//! Dual-phase-lag heat conduction on the half-line `x > 0`, truncated to
//! `[0, x_r]` by a high-order local artificial boundary condition and
//! advanced with a Crank-Nicolson finite-difference scheme.
//!
//! ```no_run
//! use dpl_core::{builtin_problem, homogenize, run, BoundaryMode, CheckOptions, Grid, PadeAbc, ProblemParams, RunOptions};
//!
//! let p = builtin_problem("example1", &ProblemParams::default())?;
//! let pade = PadeAbc::new(5, dpl_core::default_z0(p.a, p.b)?)?;
//! let hp = homogenize(&p, &pade, &CheckOptions::default())?;
//! let grid = Grid::from_steps(p.x_r, p.d, 1.0 / 32.0, 1.0 / 32.0)?;
//! let out = run(&hp, &grid, BoundaryMode::Abc(&pade), &RunOptions::default())?;
//! println!("{:?}", out.final_state.t);
//! # Ok::<(), dpl_core::Error>(())
//! ```

pub mod error;
pub mod grid;
pub mod pade;
pub mod problem;
pub mod solver;
pub mod tridiag;
pub mod verification;

pub use error::{Error, Result};
pub use grid::{discrete_norms, DiscreteNorms, Grid};
pub use pade::{default_z0, pade_coefficients, pade_sqrt, PadeAbc, DEFAULT_ORDER};
pub use problem::{
    builtin_problem, homogenize, homogenize_truncated, recover, CheckOptions, DplProblem, HomogenizedProblem,
    ProblemParams, ValidationIssue, BUILTIN_PROBLEMS,
};
pub use solver::{run, BoundaryMode, RunOptions, RunOutput, Snapshot, Solver, SolverState};
