//! Crank-Nicolson time stepping for the reduced problem.
//!
//! The second-order-in-time equation is written as a first-order system in
//! `(T, W)` with `W = T_t`, and the artificial boundary carries `N` auxiliary
//! pairs `(Z_n, sigma_n)` with `sigma_n = Z_n'`. Each step:
//!
//! 1. solves the auxiliary boundary equations for `sigma_n^k` as an affine
//!    function of the unknown boundary value `W_M^k`,
//! 2. substitutes `T^{k-1/2} = T^{k-1} + dt/4 (W^k + W^{k-1})` into every row,
//! 3. solves one tridiagonal system for `W_1^k .. W_M^k` (`W_0^k = 0`),
//! 4. updates `T`, `sigma` and `Z` from the discrete relations
//!    `W^{k-1/2} = (T^k - T^{k-1}) / dt` and `sigma^{k-1/2} = (Z^k - Z^{k-1}) / dt`.
//!
//! The truncated variant closes the domain with `T_M^k = 0` instead.

use crate::error::{Error, Result};
use crate::grid::{delta_x2, Grid};
use crate::pade::PadeAbc;
use crate::problem::{recover, HomogenizedProblem};
use crate::tridiag::{thomas_solve, SolveMethod, TridiagonalSystem};

/// Discrete fields at one time level, in reduced (homogenized) variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub k: usize,
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub z: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl SolverState {
    pub fn zeros(nodes: usize, aux: usize) -> Self {
        Self {
            k: 0,
            t: vec![0.0; nodes],
            w: vec![0.0; nodes],
            z: vec![0.0; aux],
            sigma: vec![0.0; aux],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t
            .iter()
            .chain(&self.w)
            .chain(&self.z)
            .chain(&self.sigma)
            .all(|v| v.is_finite())
    }
}

/// How the right end of the computational domain is closed.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryMode<'a> {
    Abc(&'a PadeAbc),
    Dirichlet,
}

impl BoundaryMode<'_> {
    pub fn pade(&self) -> Option<&PadeAbc> {
        match self {
            BoundaryMode::Abc(p) => Some(p),
            BoundaryMode::Dirichlet => None,
        }
    }
}

/// Initial level: `T = xi1`, `W = eta1`, `Z = sigma = 0`.
///
/// `T_0` and `W_0` are pinned to zero; compatible data only differs from that
/// by the compatibility tolerance.
pub fn init_state(hp: &HomogenizedProblem, grid: &Grid, pade: Option<&PadeAbc>) -> Result<SolverState> {
    check_grid(hp, grid)?;
    let aux = pade.map_or(0, PadeAbc::order);
    let mut state = SolverState::zeros(grid.node_count(), aux);
    for (i, x) in grid.nodes().enumerate().skip(1) {
        state.t[i] = hp.xi1(x);
        state.w[i] = hp.eta1(x);
    }
    if !state.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    Ok(state)
}

fn check_grid(hp: &HomogenizedProblem, grid: &Grid) -> Result<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !close(hp.x_r, grid.x_r) || !close(hp.d, grid.d) {
        return Err(Error::Grid(format!(
            "grid covers [0, {}] x [0, {}] but the problem is posed on [0, {}] x [0, {}]",
            grid.x_r, grid.d, hp.x_r, hp.d
        )));
    }
    for &x in &hp.kinks {
        if x >= 0.0 && x <= hp.x_r && grid.node_index(x).is_none() {
            return Err(Error::Grid(format!(
                "data kink at x = {x} does not fall on a grid node (h = {})",
                grid.h
            )));
        }
    }
    Ok(())
}

/// Row constants shared by both closures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorCoefficients {
    /// `1/2 + a/dt`
    pub mass: f64,
    /// `1/2 - a/dt`
    pub mass_prev: f64,
    /// `K (dt/4 + b/2)`
    pub stiff: f64,
}

impl InteriorCoefficients {
    pub fn new(hp: &HomogenizedProblem, grid: &Grid) -> Self {
        Self {
            mass: 0.5 + hp.a / grid.dt,
            mass_prev: 0.5 - hp.a / grid.dt,
            stiff: hp.k * (grid.dt / 4.0 + hp.b / 2.0),
        }
    }
}

/// Per-run constants of the eliminated artificial boundary row.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcStepCoefficients {
    pub interior: InteriorCoefficients,
    /// Coefficient of `sigma_n^k` in the discrete auxiliary equation.
    pub c: Vec<f64>,
    /// Coefficient of `sigma_n^{k-1}` on the same side.
    pub c_prev: Vec<f64>,
    /// `1 / (2 c_n)`: gain from `W_M^k` to `sigma_n^k`.
    pub beta: Vec<f64>,
    pub b_n: Vec<f64>,
    /// `a_n / b_n`
    pub weight: Vec<f64>,
    /// `sqrt(z0 / K)`
    pub rho: f64,
    pub z0: f64,
    pub sum_ab: f64,
    /// Diagonal entry of the boundary row after elimination.
    pub boundary_diag: f64,
}

impl AbcStepCoefficients {
    pub fn new(hp: &HomogenizedProblem, grid: &Grid, pade: &PadeAbc) -> Self {
        let interior = InteriorCoefficients::new(hp, grid);
        let (a, b, dt, z0) = (hp.a, hp.b, grid.dt, pade.z0());
        let b_n = pade.b().to_vec();
        let c: Vec<f64> = b_n
            .iter()
            .map(|bn| z0 * (1.0 - bn) / 2.0 + bn * (dt / 4.0 + (a + b) / 2.0 + a * b / dt))
            .collect();
        let c_prev = b_n
            .iter()
            .map(|bn| z0 * (1.0 - bn) / 2.0 + bn * (dt / 4.0 + (a + b) / 2.0 - a * b / dt))
            .collect();
        let beta: Vec<f64> = c.iter().map(|cn| 1.0 / (2.0 * cn)).collect();
        let weight: Vec<f64> = pade.a().iter().zip(&b_n).map(|(an, bn)| an / bn).collect();
        let rho = (z0 / hp.k).sqrt();
        let sum_ab = pade.sum_ab();
        let coupling: f64 = weight.iter().zip(&beta).map(|(wn, bn)| wn * bn).sum();
        let h = grid.h;
        let boundary_diag =
            interior.mass + 2.0 * interior.stiff / (h * h) + (2.0 * hp.k / h) * rho * (sum_ab - z0 * coupling) / 2.0;
        Self {
            interior,
            c,
            c_prev,
            beta,
            b_n,
            weight,
            rho,
            z0,
            sum_ab,
            boundary_diag,
        }
    }
}

/// Affine law `sigma_n^k = alpha_n + beta_n W_M^k` from the auxiliary
/// equations, given the previous level and `R^{k-1/2}`.
pub fn eliminate_aux(state: &SolverState, coeffs: &AbcStepCoefficients, r_mid: f64) -> (Vec<f64>, Vec<f64>) {
    let w_m = *state.w.last().expect("state has nodes");
    let alpha = (0..coeffs.c.len())
        .map(|n| (w_m / 2.0 + r_mid - coeffs.b_n[n] * state.z[n] - coeffs.c_prev[n] * state.sigma[n]) / coeffs.c[n])
        .collect();
    (alpha, coeffs.beta.clone())
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SolverState,
    pub method: SolveMethod,
}

/// Rows `1..M-1` of the system for `W_1^k .. W_{M-1}^k`.
fn interior_rows(
    state: &SolverState,
    hp: &HomogenizedProblem,
    grid: &Grid,
    coeffs: &InteriorCoefficients,
    t_mid: f64,
    unknowns: usize,
) -> TridiagonalSystem {
    let m = grid.ms;
    let h2 = grid.h * grid.h;
    let off = -coeffs.stiff / h2;
    let diag = vec![coeffs.mass + 2.0 * coeffs.stiff / h2; unknowns];
    let lower = vec![off; unknowns - 1];
    let upper = vec![off; unknowns - 1];
    let mut rhs = vec![0.0; unknowns];
    for i in 1..m {
        rhs[i - 1] = -coeffs.mass_prev * state.w[i]
            + hp.k * delta_x2(&state.t, i, grid.h)
            + coeffs.stiff * delta_x2(&state.w, i, grid.h)
            + hp.source(grid.x(i), t_mid);
    }
    TridiagonalSystem {
        lower,
        diag,
        upper,
        rhs,
    }
}

/// Update `T` and `W` from the solved `W_1^k ..` values.
fn finish_fields(prev: &SolverState, w_new: Vec<f64>, dt: f64) -> (Vec<f64>, Vec<f64>) {
    let t_new = prev
        .t
        .iter()
        .zip(prev.w.iter().zip(&w_new))
        .map(|(tp, (wp, w))| tp + 0.5 * dt * (w + wp))
        .collect::<Vec<_>>();
    (t_new, w_new)
}

fn check_finite(state: &SolverState) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { step: state.k })
    }
}

/// One step of the scheme closed by the artificial boundary condition.
pub fn advance(
    state: &SolverState,
    hp: &HomogenizedProblem,
    grid: &Grid,
    coeffs: &AbcStepCoefficients,
) -> Result<StepOutcome> {
    let m = grid.ms;
    let k = state.k + 1;
    let t_mid = grid.t_half(k);
    let h = grid.h;
    let ic = &coeffs.interior;

    let (alpha, beta) = eliminate_aux(state, coeffs, hp.r(t_mid));

    let mut sys = interior_rows(state, hp, grid, ic, t_mid, m);
    let h2 = h * h;
    sys.lower[m - 2] = -2.0 * ic.stiff / h2;
    sys.diag[m - 1] = coeffs.boundary_diag;

    let (tp, wp) = (&state.t, &state.w);
    let aux_known: f64 = (0..alpha.len())
        .map(|n| coeffs.weight[n] * (alpha[n] + state.sigma[n]) / 2.0)
        .sum();
    let gamma = ic.stiff / hp.k;
    let bracket = -(tp[m] - tp[m - 1]) / h - gamma * (wp[m] - wp[m - 1]) / h - coeffs.rho * coeffs.sum_ab * wp[m] / 2.0
        + coeffs.rho * coeffs.z0 * aux_known
        + hp.q(t_mid);
    sys.rhs[m - 1] = -ic.mass_prev * wp[m] + (2.0 * hp.k / h) * bracket + hp.source(grid.x(m), t_mid);

    let sol = thomas_solve(&sys)?;
    let mut w_new = Vec::with_capacity(m + 1);
    w_new.push(0.0);
    w_new.extend_from_slice(&sol.x);
    let (mut t_new, w_new) = finish_fields(state, w_new, grid.dt);
    t_new[0] = 0.0;

    let w_m = w_new[m];
    let sigma: Vec<f64> = alpha.iter().zip(&beta).map(|(al, be)| al + be * w_m).collect();
    let z = state
        .z
        .iter()
        .zip(state.sigma.iter().zip(&sigma))
        .map(|(zp, (sp, s))| zp + 0.5 * grid.dt * (s + sp))
        .collect();

    let next = SolverState {
        k,
        t: t_new,
        w: w_new,
        z,
        sigma,
    };
    check_finite(&next)?;
    Ok(StepOutcome {
        state: next,
        method: sol.method,
    })
}

/// One step with the right end held at `T_M^k = 0`.
pub fn advance_dirichlet(state: &SolverState, hp: &HomogenizedProblem, grid: &Grid) -> Result<StepOutcome> {
    let m = grid.ms;
    let k = state.k + 1;
    let t_mid = grid.t_half(k);
    let ic = InteriorCoefficients::new(hp, grid);

    // T_M^k = 0 through W^{k-1/2} = (T^k - T^{k-1}) / dt
    let w_m = -2.0 / grid.dt * state.t[m] - state.w[m];

    let mut sys = interior_rows(state, hp, grid, &ic, t_mid, m - 1);
    sys.rhs[m - 2] += ic.stiff / (grid.h * grid.h) * w_m;

    let sol = thomas_solve(&sys)?;
    let mut w_new = Vec::with_capacity(m + 1);
    w_new.push(0.0);
    w_new.extend_from_slice(&sol.x);
    w_new.push(w_m);
    let (mut t_new, w_new) = finish_fields(state, w_new, grid.dt);
    t_new[0] = 0.0;
    t_new[m] = 0.0;

    let next = SolverState {
        k,
        t: t_new,
        w: w_new,
        z: Vec::new(),
        sigma: Vec::new(),
    };
    check_finite(&next)?;
    Ok(StepOutcome {
        state: next,
        method: sol.method,
    })
}

enum Closure {
    Abc(AbcStepCoefficients),
    Dirichlet,
}

/// Owns a state and advances it level by level.
pub struct Solver<'a> {
    hp: &'a HomogenizedProblem,
    grid: Grid,
    closure: Closure,
    state: SolverState,
    fallbacks: usize,
}

impl<'a> Solver<'a> {
    pub fn new(hp: &'a HomogenizedProblem, grid: Grid, mode: BoundaryMode<'_>) -> Result<Self> {
        let state = init_state(hp, &grid, mode.pade())?;
        let closure = match mode {
            BoundaryMode::Abc(pade) => Closure::Abc(AbcStepCoefficients::new(hp, &grid, pade)),
            BoundaryMode::Dirichlet => Closure::Dirichlet,
        };
        Ok(Self {
            hp,
            grid,
            closure,
            state,
            fallbacks: 0,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Steps that needed the pivoting fallback.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    pub fn is_finished(&self) -> bool {
        self.state.k >= self.grid.mt
    }

    pub fn step(&mut self) -> Result<()> {
        let outcome = match &self.closure {
            Closure::Abc(coeffs) => advance(&self.state, self.hp, &self.grid, coeffs)?,
            Closure::Dirichlet => advance_dirichlet(&self.state, self.hp, &self.grid)?,
        };
        if outcome.method == SolveMethod::DenseFallback {
            self.fallbacks += 1;
        }
        debug_assert!(coupling_residual(&self.state, &outcome.state, self.grid.dt) <= 1e-12);
        self.state = outcome.state;
        Ok(())
    }

    pub fn into_state(self) -> SolverState {
        self.state
    }
}

/// `max_i |T^k - T^{k-1} - dt/2 (W^k + W^{k-1})|`, relative to `max_i |W^k|`.
pub fn coupling_residual(prev: &SolverState, next: &SolverState, dt: f64) -> f64 {
    let scale = next.w.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let worst = (0..next.t.len()).fold(0.0f64, |m, i| {
        m.max((next.t[i] - prev.t[i] - 0.5 * dt * (next.w[i] + prev.w[i])).abs())
    });
    if worst == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Times at which to keep a copy of the solution; must be grid times.
    pub snapshot_times: Vec<f64>,
    /// Keep `T^k` for every level.
    pub record_trajectory: bool,
    /// Stop after this many steps instead of `M_t`.
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub k: usize,
    pub time: f64,
    pub reduced: Vec<f64>,
    pub physical: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: SolverState,
    pub snapshots: Vec<Snapshot>,
    /// `T^0 .. T^m` in reduced variables, when requested.
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub fallbacks: usize,
}

pub fn run(hp: &HomogenizedProblem, grid: &Grid, mode: BoundaryMode<'_>, opts: &RunOptions) -> Result<RunOutput> {
    let steps = opts.steps.unwrap_or(grid.mt).min(grid.mt);
    let mut wanted = opts
        .snapshot_times
        .iter()
        .map(|&t| match grid.time_index(t) {
            Some(k) if k <= steps => Ok(k),
            _ => Err(Error::Grid(format!(
                "snapshot time {t} is not a time level in [0, {}] (dt = {})",
                grid.t(steps),
                grid.dt
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    wanted.sort_unstable();
    wanted.dedup();

    let mut solver = Solver::new(hp, *grid, mode)?;
    let mut snapshots = Vec::with_capacity(wanted.len());
    let mut trajectory = opts.record_trajectory.then(|| vec![solver.state().t.clone()]);
    let mut take = |state: &SolverState| {
        if wanted.binary_search(&state.k).is_ok() {
            let time = grid.t(state.k);
            snapshots.push(Snapshot {
                k: state.k,
                time,
                reduced: state.t.clone(),
                physical: recover(&state.t, |t| hp.phi(t), time),
            });
        }
    };
    take(solver.state());
    while solver.state().k < steps {
        solver.step()?;
        take(solver.state());
        if let Some(traj) = trajectory.as_mut() {
            traj.push(solver.state().t.clone());
        }
    }
    let fallbacks = solver.fallbacks();
    Ok(RunOutput {
        final_state: solver.into_state(),
        snapshots,
        trajectory,
        fallbacks,
    })
}
