use std::path::PathBuf;
use std::time::Instant;

use dpl_core::verification::{
    convergence_study, domain_truncation_compare, ladder, stability_audit, ConvergenceReport, TruncationSettings,
};
use dpl_core::{homogenize, homogenize_truncated, run, BoundaryMode, CheckOptions, DplProblem, Grid, RunOptions};
use serde::Serialize;

use crate::config::{BoundaryKind, Command, ParamSet, Refinement, RunConfig, Z0Spec};
use crate::error::CliError;
use crate::output::{ensure_dir, num, num_opt, write_csv, write_json};

/// Files written and a short human-readable report.
#[derive(Debug, Default)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

#[derive(Serialize)]
struct Meta<'a> {
    command: String,
    config: RunConfig,
    h: f64,
    dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    z0: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    wall_time_s: f64,
    fallbacks: usize,
    warnings: &'a [String],
}

fn check_options(cfg: &RunConfig) -> CheckOptions {
    CheckOptions {
        strict: cfg.strict,
        ..Default::default()
    }
}

/// The config with every default made explicit.
fn resolved(cfg: &RunConfig, cmd: Command, p: &DplProblem, grid: Option<&Grid>, z0: Option<f64>) -> RunConfig {
    let abc = cfg.boundary() == BoundaryKind::Abc;
    RunConfig {
        problem: Some(cfg.problem_name(cmd)),
        a: Some(p.a),
        b: Some(p.b),
        k: Some(p.k),
        x_r: Some(p.x_r),
        d: Some(p.d),
        ms: grid.map(|g| g.ms),
        mt: grid.map(|g| g.mt),
        h: None,
        dt: None,
        n: abc.then(|| cfg.abc_settings().order),
        z0: z0.map(Z0Spec::Value),
        mode: matches!(cmd, Command::Solve | Command::Audit).then(|| cfg.boundary()),
        output: Some(cfg.output_dir()),
        ..cfg.clone()
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Summary, CliError> {
    let cmd = Command::Solve;
    cfg.check(cmd)?;
    let p = cfg.build_problem(cmd)?;
    let grid = cfg.build_grid(&p, None)?;
    let times = cfg.snapshot_times.clone().unwrap_or_else(|| vec![p.d]);
    let opts = RunOptions {
        snapshot_times: times,
        ..Default::default()
    };

    let start = Instant::now();
    let (out, hp, pade) = match cfg.boundary() {
        BoundaryKind::Abc => {
            let pade = cfg.build_pade(&p)?;
            let hp = homogenize(&p, &pade, &check_options(cfg))?;
            (run(&hp, &grid, BoundaryMode::Abc(&pade), &opts)?, hp, Some(pade))
        }
        BoundaryKind::Dirichlet => {
            let hp = homogenize_truncated(&p, &check_options(cfg))?;
            (run(&hp, &grid, BoundaryMode::Dirichlet, &opts)?, hp, None)
        }
    };
    let wall = start.elapsed().as_secs_f64();

    let dir = cfg.output_dir();
    ensure_dir(&dir)?;
    let rows = out.snapshots.iter().flat_map(|s| {
        (0..grid.node_count()).map(move |i| vec![num(s.time), num(grid.x(i)), num(s.reduced[i]), num(s.physical[i])])
    });
    let mut summary = Summary::default();
    summary.files.push(write_csv(
        &dir.join("solution.csv"),
        &["t", "x", "T_reduced", "T_physical"],
        rows,
    )?);

    let warnings: Vec<String> = hp.warnings.iter().map(ToString::to_string).collect();
    let z0 = pade.as_ref().map(|p| p.z0());
    let meta = Meta {
        command: cmd.to_string(),
        config: resolved(cfg, cmd, &p, Some(&grid), z0),
        h: grid.h,
        dt: grid.dt,
        z0,
        n: pade.as_ref().map(|p| p.order()),
        wall_time_s: wall,
        fallbacks: out.fallbacks,
        warnings: &warnings,
    };
    summary.files.push(write_json(&dir.join("meta.json"), &meta)?);
    summary.lines.push(format!(
        "{} on {} nodes x {} steps, {} snapshot(s), {} fallback(s), {:.3} s",
        p.name,
        grid.node_count(),
        grid.mt,
        out.snapshots.len(),
        out.fallbacks,
        wall
    ));
    summary.lines.extend(warnings.iter().map(|w| format!("warning: {w}")));
    Ok(summary)
}

const DEFAULT_SETS: [ParamSet; 2] = [ParamSet { a: 1.0, b: 0.2 }, ParamSet { a: 2.0, b: 3.0 }];

#[derive(Serialize)]
struct ConvergenceMeta {
    command: &'static str,
    config: RunConfig,
    refinement: Refinement,
    z0: f64,
    #[serde(rename = "N")]
    n: usize,
    wall_time_s: f64,
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<Summary, CliError> {
    let cmd = Command::Convergence;
    cfg.check(cmd)?;
    let refinement = cfg.refinement.unwrap_or(Refinement::Ht);
    let levels = cfg.levels.unwrap_or(5);
    let start = cfg.start_step.unwrap_or(0.125);
    let steps = ladder(start, levels);

    let sets: Vec<ParamSet> = match (&cfg.parameter_sets, cfg.a, cfg.b) {
        (Some(sets), _, _) => sets.clone(),
        (None, None, None) if cfg.problem_name(cmd) == "example1" => DEFAULT_SETS.to_vec(),
        _ => {
            let base = cfg.build_problem(cmd)?;
            vec![ParamSet { a: base.a, b: base.b }]
        }
    };
    let dir = cfg.output_dir();
    let mut summary = Summary::default();
    for set in &sets {
        let one = RunConfig {
            a: Some(set.a),
            b: Some(set.b),
            parameter_sets: None,
            ..cfg.clone()
        };
        let p = one.build_problem(cmd)?;
        let t0 = Instant::now();
        let report = convergence_study(&p, &one.abc_settings(), &steps, refinement.mode())?;
        let wall = t0.elapsed().as_secs_f64();
        let sub = if sets.len() == 1 {
            dir.clone()
        } else {
            dir.join(format!("a{}_b{}", set.a, set.b))
        };
        ensure_dir(&sub)?;
        summary.files.push(write_convergence(&sub, &report)?);
        let z0 = one.resolved_z0(p.a, p.b)?;
        let meta = ConvergenceMeta {
            command: "convergence",
            config: RunConfig {
                levels: Some(levels),
                start_step: Some(start),
                refinement: Some(refinement),
                ..resolved(&one, cmd, &p, None, Some(z0))
            },
            refinement,
            z0,
            n: one.abc_settings().order,
            wall_time_s: wall,
        };
        summary.files.push(write_json(&sub.join("meta.json"), &meta)?);
        summary.lines.push(format!(
            "a = {}, b = {} ({:?}, {:.3} s)",
            set.a, set.b, refinement, wall
        ));
        for e in &report.entries {
            summary.lines.push(format!(
                "  {:<12} {:.6e}  {}",
                format!("1/{}", (1.0 / e.step).round()),
                e.error,
                e.rate.map(|r| format!("{r:.4}")).unwrap_or_default()
            ));
        }
    }
    Ok(summary)
}

fn write_convergence(dir: &std::path::Path, report: &ConvergenceReport) -> Result<PathBuf, CliError> {
    let rows = report
        .entries
        .iter()
        .map(|e| vec![num(e.step), num(e.error), num_opt(e.rate)]);
    write_csv(&dir.join("convergence.csv"), &["step", "E", "rate"], rows)
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Summary, CliError> {
    let cmd = Command::Compare;
    cfg.check(cmd)?;
    let p = cfg.build_problem(cmd)?;
    let grid = cfg.build_grid(&p, Some((1.0 / 64.0, 1.0 / 64.0)))?;
    let mut settings = TruncationSettings {
        h: grid.h,
        dt: grid.dt,
        abc_x_r: p.x_r,
        abc: cfg.abc_settings(),
        ..Default::default()
    };
    if let Some(times) = &cfg.snapshot_times {
        settings.times = times.clone();
    }
    if let Some(r) = cfg.reference_x_r {
        settings.reference_x_r = r;
    }
    if let Some(tol) = cfg.tolerance {
        settings.tolerance = tol;
    }
    let cmp = domain_truncation_compare(&p, &settings)?;

    let dir = cfg.output_dir();
    ensure_dir(&dir)?;
    let mut summary = Summary::default();
    for row in &cmp.rows {
        let rows = (0..row.x.len()).map(|i| vec![num(row.x[i]), num(row.dirichlet[i]), num(row.abc[i])]);
        let name = format!("compare_t{}.csv", row.time);
        summary
            .files
            .push(write_csv(&dir.join(name), &["x", "T_dirichlet", "T_abc"], rows)?);
        summary.lines.push(format!(
            "t = {}: max_abs = {:.3e}, max_rel = {:.3e} ({})",
            row.time,
            row.max_abs,
            row.max_rel,
            if row.max_rel <= cmp.tolerance {
                "within"
            } else {
                "above"
            }
        ));
    }
    let rows = cmp
        .rows
        .iter()
        .map(|r| vec![num(r.time), num(r.max_abs), num(r.max_rel)]);
    summary.files.push(write_csv(
        &dir.join("discrepancy.csv"),
        &["t", "max_abs", "max_rel"],
        rows,
    )?);
    summary.lines.push(format!("tolerance {}", cmp.tolerance));
    Ok(summary)
}

pub fn cmd_audit(cfg: &RunConfig) -> Result<Summary, CliError> {
    let cmd = Command::Audit;
    cfg.check(cmd)?;
    let p = cfg.build_problem(cmd)?;
    let grid = cfg.build_grid(&p, None)?;
    let pade = cfg.build_pade(&p)?;
    let hp = homogenize(&p, &pade, &check_options(cfg))?;
    let out = run(
        &hp,
        &grid,
        BoundaryMode::Abc(&pade),
        &RunOptions {
            record_trajectory: true,
            ..Default::default()
        },
    )?;
    let audit = stability_audit(out.trajectory.as_deref().unwrap_or_default(), &hp, &grid, &pade)?;

    let dir = cfg.output_dir();
    ensure_dir(&dir)?;
    let rows = audit
        .rows
        .iter()
        .map(|r| vec![r.m.to_string(), num(r.lhs), num(r.rhs), r.pass.to_string()]);
    let mut summary = Summary::default();
    summary.files.push(write_csv(
        &dir.join("stability.csv"),
        &["m", "lhs", "rhs", "pass"],
        rows,
    )?);
    let failed: Vec<usize> = audit.rows.iter().filter(|r| !r.pass).map(|r| r.m).collect();
    if let Some(first) = failed.first() {
        return Err(CliError::Numerical(format!(
            "stability bound violated at {} level(s), first m = {first}",
            failed.len()
        )));
    }
    summary.lines.push(format!(
        "{}: bound holds at all {} levels, worst lhs/rhs = {:.3e}",
        p.name,
        audit.rows.len(),
        audit.worst_ratio()
    ));
    Ok(summary)
}

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Summary, CliError> {
    match cmd {
        Command::Solve => cmd_solve(cfg),
        Command::Convergence => cmd_convergence(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Audit => cmd_audit(cfg),
    }
}
