//! Rational (Padé) approximation of `sqrt(z)` about an expansion point `z0`,
//! which localizes the exact transparent boundary condition at `x = x_r`.
//!
//! The approximant is
//!
//! ```text
//! sqrt(z) ~ sqrt(z0) * (1 - sum_n a_n (1 - z/z0) / (1 - b_n (1 - z/z0)))
//! ```
//!
//! with `b_n = cos^2(n pi / (2N+1))` and `a_n = 2/(2N+1) sin^2(n pi / (2N+1))`.
//! Each term of the sum becomes one pair of auxiliary boundary unknowns in the
//! time-stepping scheme.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Padé order used when the caller does not pick one.
pub const DEFAULT_ORDER: usize = 5;

/// Closed-form coefficients `(a, b)` of the `order`-term approximant.
pub fn pade_coefficients(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            value: 0.0,
            reason: "Padé order must be at least 1",
        });
    }
    let denom = (2 * order + 1) as f64;
    let (a, b) = (1..=order)
        .map(|n| {
            let theta = n as f64 * PI / denom;
            let (s, c) = theta.sin_cos();
            (2.0 / denom * s * s, c * c)
        })
        .unzip();
    Ok((a, b))
}

/// Expansion point `z(s) = (1 + b s)(1 + a s)/s` evaluated at `s = 1`.
pub fn default_z0(a: f64, b: f64) -> Result<f64> {
    positive("a", a)?;
    positive("b", b)?;
    Ok((1.0 + a) * (1.0 + b))
}

/// The data that parameterizes the high-order local boundary condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeAbc {
    order: usize,
    z0: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    sum_ab: f64,
}

impl PadeAbc {
    pub fn new(order: usize, z0: f64) -> Result<Self> {
        positive("z0", z0)?;
        let (a, b) = pade_coefficients(order)?;
        let sum_ab = 1.0 + a.iter().zip(&b).map(|(an, bn)| an / bn).sum::<f64>();
        Ok(Self {
            order,
            z0,
            a,
            b,
            sum_ab,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `1 + sum_n a_n / b_n`.
    pub fn sum_ab(&self) -> f64 {
        self.sum_ab
    }

    /// Evaluate the rational approximant of `sqrt(z)`.
    ///
    /// Only meant for checking approximation quality; the time loop never
    /// calls this.
    pub fn sqrt_approx(&self, z: f64) -> Result<f64> {
        positive("z", z)?;
        let u = 1.0 - z / self.z0;
        let mut sum = 0.0;
        for (n, (an, bn)) in self.a.iter().zip(&self.b).enumerate() {
            let denom = 1.0 - bn * u;
            if denom == 0.0 {
                return Err(Error::Pole { n: n + 1, z });
            }
            sum += an * u / denom;
        }
        Ok(self.z0.sqrt() * (1.0 - sum))
    }
}

pub fn pade_sqrt(z: f64, pade: &PadeAbc) -> Result<f64> {
    pade.sqrt_approx(z)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
