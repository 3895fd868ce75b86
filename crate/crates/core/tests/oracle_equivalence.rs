use dpl_core::problem::random_smooth_problem;
use dpl_core::solver::{advance, init_state, AbcStepCoefficients};
use dpl_core::verification::{dense_oracle_step, scheme_residuals};
use dpl_core::{builtin_problem, default_z0, homogenize, CheckOptions, DplProblem, Grid, PadeAbc, ProblemParams};

const AGREE: f64 = 1e-10;
const RESIDUAL: f64 = 1e-11;

fn compare(p: &DplProblem, ms: usize, order: usize, steps: usize) {
    let pade = PadeAbc::new(order, default_z0(p.a, p.b).unwrap()).unwrap();
    let hp = homogenize(p, &pade, &CheckOptions::default()).unwrap();
    let grid = Grid::new(p.x_r, p.d, ms, steps).unwrap();
    let coeffs = AbcStepCoefficients::new(&hp, &grid, &pade);
    let mut s = init_state(&hp, &grid, Some(&pade)).unwrap();
    for _ in 0..steps {
        let fast = advance(&s, &hp, &grid, &coeffs).unwrap().state;
        let slow = dense_oracle_step(&s, &hp, &grid, &pade).unwrap();
        let pairs = fast
            .t
            .iter()
            .zip(&slow.t)
            .chain(fast.w.iter().zip(&slow.w))
            .chain(fast.z.iter().zip(&slow.z))
            .chain(fast.sigma.iter().zip(&slow.sigma));
        for (u, v) in pairs {
            assert!(
                (u - v).abs() <= AGREE * u.abs().max(1.0),
                "{} M_s={ms} N={order} k={}: {u} vs {v}",
                p.name,
                fast.k
            );
        }
        let r = scheme_residuals(&s, &fast, &hp, &grid, &pade);
        assert!(r.max() <= RESIDUAL, "{} M_s={ms} N={order} k={}: {r:?}", p.name, fast.k);
        s = fast;
    }
}

#[test]
fn eliminated_step_matches_dense_coupled_step() {
    for (a, b) in [(1.0, 0.2), (2.0, 3.0)] {
        let p = builtin_problem(
            "example1",
            &ProblemParams {
                a: Some(a),
                b: Some(b),
                ..Default::default()
            },
        )
        .unwrap();
        for ms in [4, 8, 16] {
            for order in [1, 2, 4] {
                compare(&p, ms, order, 10);
            }
        }
    }
}

#[test]
fn random_data_matches_dense_coupled_step() {
    for seed in 0..6 {
        compare(&random_smooth_problem(seed), 12, 3, 10);
    }
}

#[test]
fn oracle_step_satisfies_its_own_equations() {
    let p = random_smooth_problem(42);
    let pade = PadeAbc::new(4, 1.3).unwrap();
    let hp = homogenize(&p, &pade, &CheckOptions::default()).unwrap();
    let grid = Grid::new(p.x_r, p.d, 10, 5).unwrap();
    let s = init_state(&hp, &grid, Some(&pade)).unwrap();
    let next = dense_oracle_step(&s, &hp, &grid, &pade).unwrap();
    assert!(scheme_residuals(&s, &next, &hp, &grid, &pade).max() <= RESIDUAL);
    assert!(next.t[0].abs() <= 1e-14);
}
