//! Uniform space-time grid, difference operators and the discrete norms on
//! grid functions vanishing at `x = 0`.

use crate::error::{Error, Result};

/// Relative slack when matching a requested step or time to the grid.
const GRID_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Number of spatial intervals `M_s`.
    pub ms: usize,
    /// Number of time steps `M_t`.
    pub mt: usize,
    pub h: f64,
    pub dt: f64,
    pub x_r: f64,
    pub d: f64,
}

impl Grid {
    pub fn new(x_r: f64, d: f64, ms: usize, mt: usize) -> Result<Self> {
        if !(x_r > 0.0 && d > 0.0 && x_r.is_finite() && d.is_finite()) {
            return Err(Error::Grid(format!("domain [0, {x_r}] x [0, {d}] must be positive")));
        }
        if ms < 2 {
            return Err(Error::Grid(format!("M_s = {ms}, need at least 2 intervals")));
        }
        if mt < 1 {
            return Err(Error::Grid("M_t must be at least 1".into()));
        }
        Ok(Self {
            ms,
            mt,
            h: x_r / ms as f64,
            dt: d / mt as f64,
            x_r,
            d,
        })
    }

    /// Grid whose step sizes are `h` and `dt`; both must divide their interval.
    pub fn from_steps(x_r: f64, d: f64, h: f64, dt: f64) -> Result<Self> {
        let ms = whole_multiple("h", x_r, h)?;
        let mt = whole_multiple("dt", d, dt)?;
        Self::new(x_r, d, ms, mt)
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// `t_{k-1/2}` for step `k >= 1`.
    pub fn t_half(&self, k: usize) -> f64 {
        (k as f64 - 0.5) * self.dt
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.ms).map(|i| self.x(i))
    }

    pub fn node_count(&self) -> usize {
        self.ms + 1
    }

    /// Index of the grid node at `x`, if there is one.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let r = x / self.h;
        let i = r.round();
        ((r - i).abs() <= GRID_MATCH_TOL * r.abs().max(1.0) && i >= 0.0 && i as usize <= self.ms).then_some(i as usize)
    }

    /// Index of the time level at `t`, if there is one.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        let r = t / self.dt;
        let k = r.round();
        ((r - k).abs() <= GRID_MATCH_TOL * r.abs().max(1.0) && k >= 0.0 && k as usize <= self.mt).then_some(k as usize)
    }
}

fn whole_multiple(name: &str, length: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Grid(format!("{name} = {step} must be positive")));
    }
    let r = length / step;
    let n = r.round();
    if n < 1.0 || (r - n).abs() > GRID_MATCH_TOL * r {
        return Err(Error::Grid(format!("{name} = {step} does not divide {length}")));
    }
    Ok(n as usize)
}

/// Central second difference at interior node `i`.
pub fn delta_x2(v: &[f64], i: usize, h: f64) -> f64 {
    assert!(
        i >= 1 && i + 1 < v.len(),
        "delta_x2 needs an interior node, got {i} of {}",
        v.len()
    );
    (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
}

/// `<u, v> = h sum_{1..M-1} u_i v_i + h/2 (u_0 v_0 + u_M v_M)`.
pub fn inner_product(u: &[f64], v: &[f64], h: f64) -> f64 {
    assert_eq!(u.len(), v.len());
    let m = u.len() - 1;
    let interior: f64 = (1..m).map(|i| u[i] * v[i]).sum();
    h * interior + 0.5 * h * (u[0] * v[0] + u[m] * v[m])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteNorms {
    pub l2: f64,
    pub h1: f64,
    pub inf: f64,
}

/// Trapezoid `L2`, difference-quotient `H1` seminorm and max norm of a grid
/// function with `u_0 = 0`.
pub fn discrete_norms(u: &[f64], h: f64) -> DiscreteNorms {
    assert!(u.len() >= 2, "grid function needs at least two nodes");
    assert!(u[0] == 0.0, "grid function must vanish at x = 0, got {}", u[0]);
    DiscreteNorms {
        l2: inner_product(u, u, h).sqrt(),
        h1: h1_seminorm_sq(u, h).sqrt(),
        inf: max_abs(u),
    }
}

/// `h sum_{1..M} ((u_i - u_{i-1}) / h)^2`.
pub fn h1_seminorm_sq(u: &[f64], h: f64) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h
}

pub fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_spacing_and_nodes() {
        let g = Grid::from_steps(7.0, 1.0, 0.125, 0.125).unwrap();
        assert_eq!((g.ms, g.mt), (56, 8));
        assert_relative_eq!(g.h * g.ms as f64, 7.0, max_relative = 1e-14);
        assert_relative_eq!(g.dt * g.mt as f64, 1.0, max_relative = 1e-14);
        assert_eq!(g.node_index(0.5), Some(4));
        assert_eq!(g.node_index(0.51), None);
        assert_eq!(g.time_index(1.0), Some(8));
        assert_eq!(g.t_half(1), 0.0625);
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid::new(1.0, 1.0, 1, 4).is_err());
        assert!(Grid::new(1.0, 1.0, 4, 0).is_err());
        assert!(Grid::from_steps(1.0, 1.0, 0.3, 0.1).is_err());
        assert!(Grid::new(-1.0, 1.0, 4, 4).is_err());
    }

    #[test]
    fn second_difference_basics() {
        assert_eq!(delta_x2(&[2.0; 5], 2, 0.1), 0.0);
        assert_eq!(delta_x2(&[0.0, 1.0, 0.0], 1, 0.5), -8.0);
        let h = 0.37;
        let v: Vec<f64> = (0..6).map(|i| (i as f64 * h).powi(2)).collect();
        for i in 1..5 {
            assert_relative_eq!(delta_x2(&v, i, h), 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    #[should_panic(expected = "interior node")]
    fn second_difference_rejects_boundary() {
        delta_x2(&[0.0, 1.0, 0.0], 0, 0.5);
    }

    #[test]
    fn hand_computed_norms() {
        let n = discrete_norms(&[0.0, 1.0, 2.0], 0.5);
        assert_relative_eq!(n.l2, 1.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(n.h1, 2.0, max_relative = 1e-15);
        assert_eq!(n.inf, 2.0);
        let z = discrete_norms(&[0.0; 7], 0.1);
        assert_eq!((z.l2, z.h1, z.inf), (0.0, 0.0, 0.0));
    }

    #[test]
    #[should_panic(expected = "vanish")]
    fn norms_require_zero_at_origin() {
        discrete_norms(&[1.0, 1.0], 0.5);
    }

    proptest! {
        #[test]
        fn quadratics_are_differenced_exactly(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, h in 0.01f64..2.0) {
            let v: Vec<f64> = (0..5).map(|i| { let x = i as f64 * h; c0 + c1 * x + c2 * x * x }).collect();
            let scale = (c0.abs() + c1.abs() * 4.0 * h + c2.abs() * 16.0 * h * h) / (h * h);
            prop_assert!((delta_x2(&v, 2, h) - 2.0 * c2).abs() <= 1e-12 * scale.max(1.0));
        }

        // Max norm is controlled by sqrt(x_r) times the H1 seminorm; on unit
        // length domains this is the constant-one embedding.
        #[test]
        fn max_norm_embedding(tail in proptest::collection::vec(-10.0f64..10.0, 1..200), x_r in 0.05f64..20.0) {
            let mut u = vec![0.0];
            u.extend(tail);
            let h = x_r / (u.len() - 1) as f64;
            let n = discrete_norms(&u, h);
            prop_assert!(n.inf <= x_r.sqrt() * n.h1 * (1.0 + 1e-12));
            if x_r <= 1.0 {
                prop_assert!(n.inf <= n.h1 * (1.0 + 1e-12));
            }
        }
    }
}
