use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dpl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_config(json: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.json"), json).unwrap();
    dir
}

fn read(dir: &Path, rel: &str) -> String {
    fs::read_to_string(dir.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_writes_one_row_per_node() {
    let dir = with_config(r#"{"problem":"example1","h":0.125,"dt":0.125,"snapshot_times":[1.0]}"#);
    let o = dpl(dir.path(), &["solve", "--config", "run.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "out/solution.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,T_reduced,T_physical"));
    assert_eq!(lines.count(), 57);
    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "out/meta.json")).unwrap();
    assert_eq!(meta["z0"], 2.4);
    assert_eq!(meta["N"], 5);
    assert_eq!(meta["fallbacks"], 0);
    assert_eq!(meta["config"]["M_s"], 56);
}

#[test]
fn meta_config_reproduces_the_run() {
    let dir = with_config(r#"{"M_s":20,"M_t":10,"problem":"random","seed":3}"#);
    assert_eq!(
        code(&dpl(dir.path(), &["solve", "--config", "run.json", "--out", "first"])),
        0
    );
    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "first/meta.json")).unwrap();
    fs::write(dir.path().join("again.json"), meta["config"].to_string()).unwrap();
    assert_eq!(
        code(&dpl(
            dir.path(),
            &["solve", "--config", "again.json", "--out", "second"]
        )),
        0
    );
    assert_eq!(
        read(dir.path(), "first/solution.csv"),
        read(dir.path(), "second/solution.csv")
    );
}

#[test]
fn rerun_is_byte_identical() {
    let dir = with_config(r#"{"problem":"example1","h":0.0625,"dt":0.125,"snapshot_times":[0.5,1.0]}"#);
    assert_eq!(
        code(&dpl(dir.path(), &["solve", "--config", "run.json", "--out", "a"])),
        0
    );
    assert_eq!(
        code(&dpl(dir.path(), &["solve", "--config", "run.json", "--out", "b"])),
        0
    );
    assert_eq!(
        fs::read(dir.path().join("a/solution.csv")).unwrap(),
        fs::read(dir.path().join("b/solution.csv")).unwrap()
    );
}

#[test]
fn dirichlet_with_pade_order_is_a_validation_error() {
    let dir = with_config(r#"{"mode":"dirichlet","N":5,"h":0.125,"dt":0.125}"#);
    let o = dpl(dir.path(), &["solve", "--config", "run.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("N: not allowed"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn validation_errors_exit_with_one() {
    for json in [
        r#"{"h":0.125,"dt":0.125,"M_s":4,"M_t":4}"#,
        r#"{"h":0.125}"#,
        r#"{"h":0.125,"dt":0.125,"z0":"soon"}"#,
        r#"{"h":0.125,"dt":0.125,"a":-1}"#,
        r#"{"h":0.3,"dt":0.125}"#,
        r#"{"problem":"nope","h":0.125,"dt":0.125}"#,
        r#"{"h":0.125,"dt":0.125,"snapshot_times":[0.3]}"#,
        r#"{"unknown_field":1}"#,
        "not json",
    ] {
        let dir = with_config(json);
        assert_eq!(code(&dpl(dir.path(), &["solve", "--config", "run.json"])), 1, "{json}");
    }
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&dpl(dir.path(), &["solve", "--config", "missing.json"])), 1);
    assert_eq!(code(&dpl(dir.path(), &["solve"])), 1);
    assert_eq!(code(&dpl(dir.path(), &["solve", "--no-such-flag"])), 1);
    assert_eq!(code(&dpl(dir.path(), &["compare", "--mode", "abc"])), 1);
}

#[test]
fn strict_flag_rejects_support_warnings() {
    let dir = with_config(r#"{"problem":"random","seed":1,"M_s":8,"M_t":4}"#);
    assert_eq!(code(&dpl(dir.path(), &["solve", "--config", "run.json"])), 0);
    assert_eq!(
        code(&dpl(dir.path(), &["solve", "--config", "run.json", "--strict"])),
        1
    );
}

#[test]
fn convergence_writes_one_table_per_parameter_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = dpl(dir.path(), &["convergence", "--levels", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for sub in ["a1_b0.2", "a2_b3"] {
        let csv = read(dir.path(), &format!("out/{sub}/convergence.csv"));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,E,rate");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.125,") && lines[1].ends_with(','));
        let rate: f64 = lines[3].rsplit(',').next().unwrap().parse().unwrap();
        assert!((rate - 2.0).abs() < 0.1, "{rate}");
    }
}

#[test]
fn convergence_modes_set_the_other_step() {
    let dir = with_config(r#"{"a":1.0,"b":0.2,"start_step":0.25}"#);
    for mode in ["t", "s"] {
        let out = format!("o_{mode}");
        let o = dpl(
            dir.path(),
            &[
                "convergence",
                "--config",
                "run.json",
                "--mode",
                mode,
                "--levels",
                "2",
                "--out",
                &out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(read(dir.path(), &format!("{out}/convergence.csv"))
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("0.25,"));
        let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), &format!("{out}/meta.json"))).unwrap();
        assert_eq!(meta["config"]["refinement"], mode);
    }
}

#[test]
fn convergence_needs_an_exact_solution() {
    let dir = with_config(r#"{"problem":"example2"}"#);
    assert_eq!(
        code(&dpl(
            dir.path(),
            &["convergence", "--config", "run.json", "--levels", "2"]
        )),
        1
    );
}

#[test]
fn compare_writes_four_curves_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = dpl(dir.path(), &["compare"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for t in [14, 16, 18, 20] {
        let csv = read(dir.path(), &format!("out/compare_t{t}.csv"));
        assert_eq!(csv.lines().next(), Some("x,T_dirichlet,T_abc"));
        assert_eq!(csv.lines().count(), 66);
    }
    let d = read(dir.path(), "out/discrepancy.csv");
    assert_eq!(d.lines().next(), Some("t,max_abs,max_rel"));
    for line in d.lines().skip(1) {
        let rel: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rel <= 0.05, "{line}");
    }
}

#[test]
fn compare_with_zero_source_has_zero_discrepancy() {
    let dir = with_config(
        r#"{"problem":"example2","D":2.0,"zero_source":true,"snapshot_times":[1.0,2.0],"reference_x_r":4.0}"#,
    );
    assert_eq!(code(&dpl(dir.path(), &["compare", "--config", "run.json"])), 0);
    let d = read(dir.path(), "out/discrepancy.csv");
    assert_eq!(d, "t,max_abs,max_rel\n1.0,0.0,0.0\n2.0,0.0,0.0\n");
}

#[test]
fn audit_of_zero_data_is_all_zero() {
    let dir = with_config(r#"{"problem":"zero","M_s":8,"M_t":4}"#);
    assert_eq!(code(&dpl(dir.path(), &["audit", "--config", "run.json"])), 0);
    let csv = read(dir.path(), "out/stability.csv");
    assert_eq!(csv.lines().next(), Some("m,lhs,rhs,pass"));
    for (m, line) in csv.lines().skip(1).enumerate() {
        assert_eq!(line, format!("{m},0.0,0.0,true"));
    }
}

#[test]
fn audit_passes_for_large_step_ratio() {
    let dir = with_config(r#"{"problem":"example1","h":0.125,"dt":1.0}"#);
    let o = dpl(dir.path(), &["audit", "--config", "run.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(dir.path(), "out/stability.csv")
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",true")));
}

#[test]
fn audit_rejects_dirichlet_mode() {
    let dir = with_config(r#"{"M_s":8,"M_t":4}"#);
    assert_eq!(
        code(&dpl(
            dir.path(),
            &["audit", "--config", "run.json", "--mode", "dirichlet"]
        )),
        1
    );
}

#[test]
fn seed_flag_selects_the_random_problem() {
    let dir = with_config(r#"{"problem":"random","M_s":16,"M_t":8}"#);
    for (out, seed) in [("s1", "1"), ("s1b", "1"), ("s2", "2")] {
        assert_eq!(
            code(&dpl(
                dir.path(),
                &["solve", "--config", "run.json", "--seed", seed, "--out", out]
            )),
            0
        );
    }
    assert_eq!(
        read(dir.path(), "s1/solution.csv"),
        read(dir.path(), "s1b/solution.csv")
    );
    assert_ne!(read(dir.path(), "s1/solution.csv"), read(dir.path(), "s2/solution.csv"));
}
