//! Per-level check of the discrete a priori bound
//!
//! ```text
//! ||T^m||_inf^2 <= 2 e^D / K * { K/2 |xi1|_1^2 + a/2 ||eta1||^2
//!     + sum_k dt [ 1/2 ||F||^2 + (2N+1) / (8 sqrt(K z0)) (h F_M)^2
//!                  + K^{3/2} (2N+1) / (2 sqrt(z0)) Q^2
//!                  + sqrt(K) z0^{3/2} / (4 (a+b)) sum_n a_n (R / b_n)^2 ] }
//! ```
//!
//! with the data evaluated at `t_{k-1/2}`.

use crate::grid::{discrete_norms, h1_seminorm_sq, inner_product, max_abs, Grid};
use crate::pade::PadeAbc;
use crate::problem::HomogenizedProblem;
use crate::solver::init_state;

/// Relative slack allowed on the bound for round-off.
pub const AUDIT_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// `||T^m||_inf / |T^m|_1`, or zero for a zero field.
    pub embedding_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityAudit {
    pub rows: Vec<AuditRow>,
}

impl StabilityAudit {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn worst_ratio(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                if r.rhs > 0.0 {
                    r.lhs / r.rhs
                } else if r.lhs > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Audit the trajectory `T^0, T^1, ..` of a run closed by `pade`.
pub fn stability_audit(
    trajectory: &[Vec<f64>],
    hp: &HomogenizedProblem,
    grid: &Grid,
    pade: &PadeAbc,
) -> crate::error::Result<StabilityAudit> {
    let init = init_state(hp, grid, Some(pade))?;
    let (a, b, k, h, dt) = (hp.a, hp.b, hp.k, grid.h, grid.dt);
    let z0 = pade.z0();
    let two_n1 = (2 * pade.order() + 1) as f64;
    let aux_weight: f64 = pade.a().iter().zip(pade.b()).map(|(an, bn)| an / (bn * bn)).sum();

    let base = k / 2.0 * h1_seminorm_sq(&init.t, h) + a / 2.0 * inner_product(&init.w, &init.w, h);
    let factor = 2.0 * hp.d.exp() / k;

    let mut rows = Vec::with_capacity(trajectory.len());
    let mut acc = base;
    for (m, field) in trajectory.iter().enumerate() {
        if m > 0 {
            let t_mid = grid.t_half(m);
            let f: Vec<f64> = grid.nodes().map(|x| hp.source(x, t_mid)).collect();
            let f_m = f[grid.ms];
            let (q, r) = (hp.q(t_mid), hp.r(t_mid));
            acc += dt
                * (0.5 * inner_product(&f, &f, h)
                    + two_n1 / (8.0 * (k * z0).sqrt()) * (h * f_m).powi(2)
                    + k.powf(1.5) * two_n1 / (2.0 * z0.sqrt()) * q * q
                    + k.sqrt() * z0.powf(1.5) / (4.0 * (a + b)) * aux_weight * r * r);
        }
        let lhs = max_abs(field).powi(2);
        let rhs = acc * factor;
        let norms = discrete_norms(field, h);
        rows.push(AuditRow {
            m,
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + AUDIT_SLACK),
            embedding_ratio: if norms.h1 > 0.0 { norms.inf / norms.h1 } else { 0.0 },
        });
    }
    Ok(StabilityAudit { rows })
}
