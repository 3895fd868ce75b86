//! The coupled scheme written row by row on the full unknown vector
//! `(T^k, W^k, sigma^k, Z^k)`, with no elimination. Used two ways: probed
//! column by column into a dense matrix and solved by LU, and evaluated on a
//! solver step to measure how well that step satisfies each equation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pade::PadeAbc;
use crate::problem::HomogenizedProblem;
use crate::solver::SolverState;
use crate::tridiag::dense_solve;

/// One residual row kept as its individual signed terms, so the residual can
/// be compared with the size of what cancelled.
#[derive(Default)]
struct Row {
    sum: f64,
    scale: f64,
}

impl Row {
    fn add(&mut self, coef: f64, value: f64) -> &mut Self {
        let term = coef * value;
        self.sum += term;
        self.scale += term.abs();
        self
    }

    /// Raise the scale to at least `floor`.
    fn floor(&mut self, floor: f64) -> &mut Self {
        self.scale = self.scale.max(floor);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Interior,
    Left,
    Boundary,
    Aux,
    Coupling,
    AuxCoupling,
}

/// Norm-wise relative residual of each equation family for one step:
/// largest row residual over the largest sum of term magnitudes in a row.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SchemeResiduals {
    pub interior: f64,
    pub left: f64,
    pub boundary: f64,
    pub aux: f64,
    pub coupling: f64,
    pub aux_coupling: f64,
}

impl SchemeResiduals {
    pub fn max(&self) -> f64 {
        [
            self.interior,
            self.left,
            self.boundary,
            self.aux,
            self.coupling,
            self.aux_coupling,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn rows(
    prev: &SolverState,
    next: &SolverState,
    hp: &HomogenizedProblem,
    grid: &Grid,
    pade: &PadeAbc,
) -> Vec<(Family, Row)> {
    let m = grid.ms;
    let (h, dt) = (grid.h, grid.dt);
    let (a, b, k) = (hp.a, hp.b, hp.k);
    let t_mid = grid.t_half(next.k);
    let z0 = pade.z0();
    let rho = (z0 / k).sqrt();
    let (tp, wp, t, w) = (&prev.t, &prev.w, &next.t, &next.w);
    let mut out = Vec::with_capacity(2 * m + 2 + 2 * pade.order());

    let field = t.iter().chain(tp).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut left = Row::default();
    left.add(0.5, t[0]).add(0.5, tp[0]).floor(field);
    out.push((Family::Left, left));

    let h2 = h * h;
    for i in 1..m {
        let mut r = Row::default();
        r.add(0.5, w[i]).add(0.5, wp[i]).add(a / dt, w[i]).add(-a / dt, wp[i]);
        for (j, c) in [(i + 1, 1.0), (i, -2.0), (i - 1, 1.0)] {
            let ct = -k * c / (2.0 * h2);
            let cw = -k * b * c / (2.0 * h2);
            r.add(ct, t[j]).add(ct, tp[j]).add(cw, w[j]).add(cw, wp[j]);
        }
        r.add(-1.0, hp.source(grid.x(i), t_mid));
        out.push((Family::Interior, r));
    }

    let mut bd = Row::default();
    bd.add(0.5, w[m]).add(0.5, wp[m]).add(a / dt, w[m]).add(-a / dt, wp[m]);
    let g = 2.0 * k / h2;
    for (j, c) in [(m, 1.0), (m - 1, -1.0)] {
        bd.add(g * c / 2.0, t[j]).add(g * c / 2.0, tp[j]);
        bd.add(g * b * c / 2.0, w[j]).add(g * b * c / 2.0, wp[j]);
    }
    let gb = 2.0 * k / h * rho;
    bd.add(gb * pade.sum_ab() / 2.0, w[m])
        .add(gb * pade.sum_ab() / 2.0, wp[m]);
    for n in 0..pade.order() {
        let wn = pade.a()[n] / pade.b()[n];
        bd.add(-gb * z0 * wn / 2.0, next.sigma[n])
            .add(-gb * z0 * wn / 2.0, prev.sigma[n]);
    }
    bd.add(-2.0 * k / h, hp.q(t_mid));
    bd.add(-1.0, hp.source(grid.x(m), t_mid));
    out.push((Family::Boundary, bd));

    for n in 0..pade.order() {
        let bn = pade.b()[n];
        let (s, sp, zn, zp) = (next.sigma[n], prev.sigma[n], next.z[n], prev.z[n]);
        let mut r = Row::default();
        let cs = (z0 * (1.0 - bn) + bn * (a + b)) / 2.0;
        r.add(cs, s).add(cs, sp);
        r.add(bn / 2.0, zn).add(bn / 2.0, zp);
        r.add(bn * a * b / dt, s).add(-bn * a * b / dt, sp);
        r.add(-0.5, w[m]).add(-0.5, wp[m]);
        r.add(-1.0, hp.r(t_mid));
        out.push((Family::Aux, r));
    }

    let mut anchor = Row::default();
    anchor
        .add(0.5, w[0])
        .add(0.5, wp[0])
        .add(-1.0 / dt, t[0])
        .add(1.0 / dt, tp[0])
        .floor(field / dt);
    out.push((Family::Coupling, anchor));
    for i in 1..=m {
        let mut r = Row::default();
        r.add(0.5 / h, w[i])
            .add(0.5 / h, wp[i])
            .add(-0.5 / h, w[i - 1])
            .add(-0.5 / h, wp[i - 1]);
        let c = 1.0 / (dt * h);
        r.add(-c, t[i]).add(c, tp[i]).add(c, t[i - 1]).add(-c, tp[i - 1]);
        out.push((Family::Coupling, r));
    }

    for n in 0..pade.order() {
        let mut r = Row::default();
        r.add(0.5, next.sigma[n]).add(0.5, prev.sigma[n]);
        r.add(-1.0 / dt, next.z[n]).add(1.0 / dt, prev.z[n]);
        out.push((Family::AuxCoupling, r));
    }
    out
}

/// Relative residuals of the coupled scheme's equations at the step
/// `prev -> next`.
pub fn scheme_residuals(
    prev: &SolverState,
    next: &SolverState,
    hp: &HomogenizedProblem,
    grid: &Grid,
    pade: &PadeAbc,
) -> SchemeResiduals {
    let families = [
        Family::Interior,
        Family::Left,
        Family::Boundary,
        Family::Aux,
        Family::Coupling,
        Family::AuxCoupling,
    ];
    let all = rows(prev, next, hp, grid, pade);
    let [interior, left, boundary, aux, coupling, aux_coupling] = families.map(|f| {
        let (worst, scale) = all
            .iter()
            .filter(|(g, _)| *g == f)
            .fold((0.0f64, 0.0f64), |(w, s), (_, r)| (w.max(r.sum.abs()), s.max(r.scale)));
        if worst == 0.0 {
            0.0
        } else {
            worst / scale
        }
    });
    SchemeResiduals {
        interior,
        left,
        boundary,
        aux,
        coupling,
        aux_coupling,
    }
}

fn unpack(x: &[f64], k: usize, nodes: usize, aux: usize) -> SolverState {
    SolverState {
        k,
        t: x[..nodes].to_vec(),
        w: x[nodes..2 * nodes].to_vec(),
        sigma: x[2 * nodes..2 * nodes + aux].to_vec(),
        z: x[2 * nodes + aux..].to_vec(),
    }
}

/// Advance one step by assembling the whole coupled system densely and
/// solving it with partial pivoting. Cost is cubic in `M_s + N`; intended for
/// small grids only.
pub fn dense_oracle_step(
    state: &SolverState,
    hp: &HomogenizedProblem,
    grid: &Grid,
    pade: &PadeAbc,
) -> Result<SolverState> {
    let nodes = grid.node_count();
    let aux = pade.order();
    if state.t.len() != nodes || state.w.len() != nodes || state.z.len() != aux || state.sigma.len() != aux {
        return Err(Error::Grid(format!(
            "state shape ({} nodes, {} aux) does not match grid ({nodes} nodes) and order {aux}",
            state.t.len(),
            state.z.len()
        )));
    }
    let n = 2 * nodes + 2 * aux;
    let k = state.k + 1;
    let eval = |x: &[f64]| -> Vec<f64> {
        rows(state, &unpack(x, k, nodes, aux), hp, grid, pade)
            .into_iter()
            .map(|(_, r)| r.sum)
            .collect()
    };
    let mut x = vec![0.0; n];
    let r0 = eval(&x);
    debug_assert_eq!(r0.len(), n);
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        x[j] = 1.0;
        for (i, v) in eval(&x).into_iter().enumerate() {
            a[(i, j)] = v - r0[i];
        }
        x[j] = 0.0;
    }
    let rhs: Vec<f64> = r0.iter().map(|v| -v).collect();
    let sol = dense_solve(a, &rhs)?;
    let next = unpack(&sol, k, nodes, aux);
    if !next.is_finite() {
        return Err(Error::NonFinite { step: k });
    }
    Ok(next)
}
