//! Tridiagonal solves for the per-step linear system.
//!
//! Thomas elimination is used without pivoting when the matrix is strictly
//! diagonally dominant by rows; otherwise the system goes through a dense
//! LU with partial pivoting and the caller is told so.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `lower[i] = A[i+1][i]`, `upper[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Thomas,
    DenseFallback,
}

#[derive(Debug, Clone)]
pub struct TridiagonalSolution {
    pub x: Vec<f64>,
    pub method: SolveMethod,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::Singular(format!(
                "inconsistent tridiagonal shapes: lower {}, diag {n}, upper {}, rhs {}",
                lower.len(),
                upper.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            lower,
            diag,
            upper,
            rhs,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `|diag_i| > |lower_{i-1}| + |upper_i|` on every row.
    pub fn is_strictly_dominant(&self) -> bool {
        (0..self.len()).all(|i| {
            let off = self.row_lower(i).abs() + self.row_upper(i).abs();
            self.diag[i].abs() > off
        })
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < self.len() {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            if i + 1 < n {
                a[(i, i + 1)] = self.upper[i];
                a[(i + 1, i)] = self.lower[i];
            }
        }
        a
    }

    fn row_lower(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.lower[i - 1]
        }
    }

    fn row_upper(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            0.0
        } else {
            self.upper[i]
        }
    }
}

pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<TridiagonalSolution> {
    if !sys.is_strictly_dominant() {
        let x = dense_solve(sys.to_dense(), &sys.rhs)?;
        return Ok(TridiagonalSolution {
            x,
            method: SolveMethod::DenseFallback,
        });
    }
    let n = sys.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];

    let mut pivot = sys.diag[0];
    if n > 1 {
        c[0] = sys.upper[0] / pivot;
    }
    x[0] = sys.rhs[0] / pivot;
    for i in 1..n {
        let l = sys.lower[i - 1];
        pivot = sys.diag[i] - l * c[i - 1];
        if i + 1 < n {
            c[i] = sys.upper[i] / pivot;
        }
        x[i] = (sys.rhs[i] - l * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(TridiagonalSolution {
        x,
        method: SolveMethod::Thomas,
    })
}

/// Dense solve by LU with partial pivoting.
pub fn dense_solve(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    let lu = a.lu();
    lu.solve(&DVector::from_column_slice(b))
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Singular(format!("dense {n}x{n} system has a zero pivot")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dominant(n: usize, rng: &mut ChaCha8Rng) -> TridiagonalSystem {
        let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag = (0..n)
            .map(|i| {
                let off = if i > 0 { lower[i - 1].abs() } else { 0.0 } + if i + 1 < n { upper[i].abs() } else { 0.0 };
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * (off + rng.gen_range(0.01..2.0))
            })
            .collect();
        let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        TridiagonalSystem::new(lower, diag, upper, rhs).unwrap()
    }

    fn residual_inf(sys: &TridiagonalSystem, x: &[f64]) -> f64 {
        sys.apply(x)
            .iter()
            .zip(&sys.rhs)
            .fold(0.0, |m, (ax, b)| m.max((ax - b).abs()))
    }

    #[test]
    fn identity_system() {
        let sys = TridiagonalSystem::new(vec![0.0; 2], vec![1.0; 3], vec![0.0; 2], vec![1.0, 2.0, 3.0]).unwrap();
        let sol = thomas_solve(&sys).unwrap();
        assert_eq!(sol.x, vec![1.0, 2.0, 3.0]);
        assert_eq!(sol.method, SolveMethod::Thomas);
    }

    #[test]
    fn two_by_two_by_hand() {
        let sys = TridiagonalSystem::new(vec![-1.0], vec![2.0, 2.0], vec![-1.0], vec![1.0, 1.0]).unwrap();
        let sol = thomas_solve(&sys).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-15 && (sol.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_system() {
        let sys = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(thomas_solve(&sys).unwrap().x, vec![0.5]);
    }

    #[test]
    fn matches_dense_solver_on_random_50x50() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let sys = random_dominant(50, &mut rng);
            let thomas = thomas_solve(&sys).unwrap();
            assert_eq!(thomas.method, SolveMethod::Thomas);
            let dense = dense_solve(sys.to_dense(), &sys.rhs).unwrap();
            let scale = dense.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (a, b) in thomas.x.iter().zip(&dense) {
                assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn large_dominant_system_has_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = random_dominant(10_000, &mut rng);
        let sol = thomas_solve(&sys).unwrap();
        let b_inf = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(residual_inf(&sys, &sol.x) <= 1e-12 * b_inf);
    }

    #[test]
    fn non_dominant_system_uses_pivoting_fallback() {
        // Zero leading pivot: Thomas without pivoting would divide by zero.
        let sys =
            TridiagonalSystem::new(vec![1.0, 1.0], vec![0.0, 1.0, 3.0], vec![2.0, 1.0], vec![2.0, 3.0, 4.0]).unwrap();
        assert!(!sys.is_strictly_dominant());
        let sol = thomas_solve(&sys).unwrap();
        assert_eq!(sol.method, SolveMethod::DenseFallback);
        assert!(residual_inf(&sys, &sol.x) < 1e-12);
    }

    #[test]
    fn singular_fallback_is_an_error() {
        let sys = TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(thomas_solve(&sys), Err(Error::Singular(_))));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        assert!(TridiagonalSystem::new(vec![1.0], vec![1.0], vec![], vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn thomas_inverts_dominant_systems(seed in any::<u64>(), n in 1usize..400) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sys = if n == 1 {
                TridiagonalSystem::new(vec![], vec![rng.gen_range(0.5..3.0)], vec![], vec![rng.gen_range(-5.0..5.0)]).unwrap()
            } else {
                random_dominant(n, &mut rng)
            };
            let sol = thomas_solve(&sys).unwrap();
            let b_inf = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(residual_inf(&sys, &sol.x) <= 1e-12 * b_inf.max(1e-300));
        }
    }
}
