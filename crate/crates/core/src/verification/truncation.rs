//! Artificial-boundary run on a short domain against a Dirichlet run on a
//! long one, compared on the nodes they share.

use crate::error::{Error, Result};
use crate::grid::{max_abs, Grid};
use crate::problem::{homogenize, homogenize_truncated, CheckOptions, DplProblem};
use crate::solver::{run, BoundaryMode, RunOptions};

use super::convergence::AbcSettings;

/// Default relative sup-discrepancy accepted between the two runs.
pub const DEFAULT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSettings {
    pub h: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    /// Right end of the artificial-boundary run; also the compared window.
    pub abc_x_r: f64,
    pub reference_x_r: f64,
    pub abc: AbcSettings,
    pub tolerance: f64,
}

impl Default for TruncationSettings {
    fn default() -> Self {
        Self {
            h: 1.0 / 64.0,
            dt: 1.0 / 64.0,
            times: vec![14.0, 16.0, 18.0, 20.0],
            abc_x_r: 1.0,
            reference_x_r: 20.0,
            abc: AbcSettings::default(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRow {
    pub time: f64,
    pub x: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub abc: Vec<f64>,
    pub max_abs: f64,
    /// `max_abs / max |T_dirichlet|` over the window.
    pub max_rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationComparison {
    pub rows: Vec<TruncationRow>,
    pub tolerance: f64,
}

impl TruncationComparison {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.max_rel <= self.tolerance)
    }
}

fn window_nodes(h: f64, window: f64) -> Result<usize> {
    let r = window / h;
    let n = r.round();
    if n < 2.0 || (r - n).abs() > 1e-9 * r {
        return Err(Error::Grid(format!(
            "h = {h} does not divide the compared window [0, {window}]"
        )));
    }
    Ok(n as usize + 1)
}

/// Physical Dirichlet-closed profiles on `[0, window]` at each time, for the
/// problem posed on `[0, x_r]`.
pub fn dirichlet_profiles(
    problem: &DplProblem,
    x_r: f64,
    h: f64,
    dt: f64,
    times: &[f64],
    window: f64,
) -> Result<Vec<Vec<f64>>> {
    let nodes = window_nodes(h, window)?;
    let p = problem.clone().with_x_r(x_r);
    let hp = homogenize_truncated(&p, &CheckOptions::default())?;
    let grid = Grid::from_steps(x_r, p.d, h, dt)?;
    let out = run(
        &hp,
        &grid,
        BoundaryMode::Dirichlet,
        &RunOptions {
            snapshot_times: times.to_vec(),
            ..Default::default()
        },
    )?;
    Ok(order_snapshots(&grid, times, out.snapshots)
        .into_iter()
        .map(|v| v[..nodes].to_vec())
        .collect())
}

fn order_snapshots(grid: &Grid, times: &[f64], snaps: Vec<crate::solver::Snapshot>) -> Vec<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            let k = grid.time_index(t).expect("validated by run");
            snaps
                .iter()
                .find(|s| s.k == k)
                .expect("snapshot recorded")
                .physical
                .clone()
        })
        .collect()
}

pub fn domain_truncation_compare(problem: &DplProblem, settings: &TruncationSettings) -> Result<TruncationComparison> {
    let TruncationSettings {
        h,
        dt,
        abc_x_r,
        reference_x_r,
        ..
    } = *settings;
    if reference_x_r < abc_x_r {
        return Err(Error::Grid(format!(
            "reference domain [0, {reference_x_r}] is shorter than the compared window [0, {abc_x_r}]"
        )));
    }
    let times = &settings.times;
    let (reference, abc) = rayon::join(
        || dirichlet_profiles(problem, reference_x_r, h, dt, times, abc_x_r),
        || -> Result<Vec<Vec<f64>>> {
            let p = problem.clone().with_x_r(abc_x_r);
            let pade = settings.abc.build(p.a, p.b)?;
            let hp = homogenize(&p, &pade, &CheckOptions::default())?;
            let grid = Grid::from_steps(abc_x_r, p.d, h, dt)?;
            let out = run(
                &hp,
                &grid,
                BoundaryMode::Abc(&pade),
                &RunOptions {
                    snapshot_times: times.clone(),
                    ..Default::default()
                },
            )?;
            Ok(order_snapshots(&grid, times, out.snapshots))
        },
    );
    let (reference, abc) = (reference?, abc?);
    let nodes = abc.first().map_or(0, Vec::len);
    let x: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
    let rows = times
        .iter()
        .zip(reference.into_iter().zip(abc))
        .map(|(&time, (dirichlet, abc))| {
            let diff = dirichlet
                .iter()
                .zip(&abc)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            let scale = max_abs(&dirichlet);
            let max_rel = if diff == 0.0 { 0.0 } else { diff / scale };
            TruncationRow {
                time,
                x: x.clone(),
                dirichlet,
                abc,
                max_abs: diff,
                max_rel,
            }
        })
        .collect();
    Ok(TruncationComparison {
        rows,
        tolerance: settings.tolerance,
    })
}
