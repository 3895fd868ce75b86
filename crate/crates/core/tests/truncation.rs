use dpl_core::verification::{dirichlet_profiles, domain_truncation_compare, TruncationSettings};
use dpl_core::{
    builtin_problem, homogenize, homogenize_truncated, run, BoundaryMode, CheckOptions, Grid, PadeAbc, ProblemParams,
    RunOptions,
};

#[test]
fn localized_data_agrees_before_reaching_the_boundary() {
    // example1 data decay like exp(-x^2); over a short time both closures on
    // [0, 7] are indistinguishable at discretization accuracy.
    let p = builtin_problem(
        "example1",
        &ProblemParams {
            d: Some(0.25),
            ..Default::default()
        },
    )
    .unwrap();
    let grid = Grid::from_steps(7.0, 0.25, 1.0 / 16.0, 1.0 / 64.0).unwrap();
    let pade = PadeAbc::new(5, 2.4).unwrap();
    let abc = run(
        &homogenize(&p, &pade, &CheckOptions::default()).unwrap(),
        &grid,
        BoundaryMode::Abc(&pade),
        &RunOptions::default(),
    )
    .unwrap();
    let dir = run(
        &homogenize_truncated(&p, &CheckOptions::default()).unwrap(),
        &grid,
        BoundaryMode::Dirichlet,
        &RunOptions::default(),
    )
    .unwrap();
    let window = grid.node_index(3.0).unwrap();
    for i in 0..=window {
        assert!((abc.final_state.t[i] - dir.final_state.t[i]).abs() < 1e-3, "i={i}");
    }
}

#[test]
fn zero_source_gives_zero_discrepancy() {
    let p = builtin_problem(
        "example2",
        &ProblemParams {
            d: Some(1.0),
            zero_source: true,
            ..Default::default()
        },
    )
    .unwrap();
    let s = TruncationSettings {
        times: vec![0.5, 1.0],
        reference_x_r: 3.0,
        ..Default::default()
    };
    let c = domain_truncation_compare(&p, &s).unwrap();
    assert!(c.rows.iter().all(|r| r.max_abs == 0.0 && r.max_rel == 0.0));
    assert!(c.passed());
}

#[test]
fn longer_reference_domain_barely_moves_the_window() {
    let p = builtin_problem(
        "example2",
        &ProblemParams {
            d: Some(2.0),
            ..Default::default()
        },
    )
    .unwrap();
    let h = 1.0 / 32.0;
    let a = dirichlet_profiles(&p, 6.0, h, h, &[2.0], 1.0).unwrap();
    let b = dirichlet_profiles(&p, 8.0, h, h, &[2.0], 1.0).unwrap();
    let shift = a[0].iter().zip(&b[0]).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    let scale = a[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(shift < 1e-4 * scale, "{shift} vs {scale}");
    assert_eq!(a[0].len(), 33);
}
