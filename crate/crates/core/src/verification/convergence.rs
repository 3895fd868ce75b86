use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pade::{default_z0, PadeAbc, DEFAULT_ORDER};
use crate::problem::{homogenize, CheckOptions, DplProblem, HomogenizedProblem};
use crate::solver::{run, BoundaryMode, RunOptions, SolverState};

/// Order and expansion point of the artificial boundary; `z0 = None` picks
/// `(1 + a)(1 + b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcSettings {
    pub order: usize,
    pub z0: Option<f64>,
}

impl Default for AbcSettings {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            z0: None,
        }
    }
}

impl AbcSettings {
    pub fn build(&self, a: f64, b: f64) -> Result<PadeAbc> {
        let z0 = match self.z0 {
            Some(z) => z,
            None => default_z0(a, b)?,
        };
        PadeAbc::new(self.order, z0)
    }
}

/// Which step is refined along the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementMode {
    /// `h = dt = s`
    Coupled,
    /// `dt = s`, `h = s / 50`
    Temporal,
    /// `h = s`, `dt = s / 50`
    Spatial,
}

impl RefinementMode {
    /// `(h, dt)` for ladder value `s`.
    pub fn steps(self, s: f64) -> (f64, f64) {
        match self {
            RefinementMode::Coupled => (s, s),
            RefinementMode::Temporal => (s / 50.0, s),
            RefinementMode::Spatial => (s, s / 50.0),
        }
    }
}

/// `start, start/2, ..` with `levels` entries.
pub fn ladder(start: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|j| start / (1u64 << j) as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEntry {
    pub step: f64,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
    /// `log2(E_prev / E)`; absent on the first level.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub mode: RefinementMode,
    pub entries: Vec<ConvergenceEntry>,
}

impl ConvergenceReport {
    pub fn rates(&self) -> Vec<f64> {
        self.entries.iter().filter_map(|e| e.rate).collect()
    }
}

/// `max_{1<=i<=M} |T(x_i, t_k) - (T_i^k + phi(t_k))|`.
pub fn max_node_error(problem: &DplProblem, hp: &HomogenizedProblem, grid: &Grid, state: &SolverState) -> Result<f64> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::NoExactSolution(problem.name.clone()))?;
    let t = grid.t(state.k);
    let shift = hp.phi(t);
    Ok((1..=grid.ms)
        .map(|i| (exact(grid.x(i), t) - (state.t[i] + shift)).abs())
        .fold(0.0, f64::max))
}

/// Final-time max-norm error on each ladder level, levels run in parallel.
pub fn convergence_study(
    problem: &DplProblem,
    abc: &AbcSettings,
    steps: &[f64],
    mode: RefinementMode,
) -> Result<ConvergenceReport> {
    if problem.exact.is_none() {
        return Err(Error::NoExactSolution(problem.name.clone()));
    }
    let pade = abc.build(problem.a, problem.b)?;
    let hp = homogenize(problem, &pade, &CheckOptions::default())?;
    let errors = steps
        .par_iter()
        .map(|&s| {
            let (h, dt) = mode.steps(s);
            let grid = Grid::from_steps(problem.x_r, problem.d, h, dt)?;
            let out = run(&hp, &grid, BoundaryMode::Abc(&pade), &RunOptions::default())?;
            Ok((h, dt, max_node_error(problem, &hp, &grid, &out.final_state)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries: Vec<ConvergenceEntry> = Vec::with_capacity(steps.len());
    for (&step, (h, dt, error)) in steps.iter().zip(errors) {
        let rate = entries.last().map(|prev| (prev.error / error).log2());
        entries.push(ConvergenceEntry {
            step,
            h,
            dt,
            error,
            rate,
        });
    }
    Ok(ConvergenceReport { mode, entries })
}
