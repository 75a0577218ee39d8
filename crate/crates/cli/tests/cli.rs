use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wavedg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavedg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_owned()
}

#[test]
fn short_run_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = wavedg(&["run", "--case", "1", "--p", "2", "--cells", "4", "--max-steps", "10", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("history.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,t,dt,sup_u,sup_phi,K_u,K_phi,scheme");
    assert_eq!(lines.len(), 11);
    assert!(lines[10].starts_with("10,"));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "max_steps");
    assert_eq!(summary["steps"], 10);
    assert_eq!(summary["spec"]["cells"], 4);
}

#[test]
fn stride_thins_history_but_keeps_last_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = wavedg(&["run", "--case", "1", "--cells", "4", "--max-steps", "10", "--stride", "4", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("history.csv")).unwrap();
    let steps: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(steps, ["4", "8", "10"]);
}

#[test]
fn bad_degree_exits_with_input_status() {
    let o = wavedg(&["run", "--k", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0..7"), "{}", stderr(&o));

    let o = wavedg(&["dump-matrices", "--k", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "case = 1\ncells = 8\nk = 2\nmax_steps = 3\n").unwrap();
    let out = out_arg(dir.path());
    let o = wavedg(&["run", "--config", cfg.to_str().unwrap(), "--cells", "6", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["spec"]["cells"], 6);
    assert_eq!(summary["spec"]["k"], 2);
    assert_eq!(summary["steps"], 3);

    fs::write(&cfg, "celz = 8\n").unwrap();
    let o = wavedg(&["run", "--config", cfg.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("celz"), "{}", stderr(&o));
}

#[test]
fn validate_is_deterministic_and_catches_corruption() {
    let a = wavedg(&["validate", "--seed", "11"]);
    let b = wavedg(&["validate", "--seed", "11"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("PASS")).count(), 6);

    let bad = wavedg(&["validate", "--seed", "11", "--corrupt-alpha", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).lines().any(|l| l.starts_with("FAIL alpha_table")), "{}", stdout(&bad));
}

#[test]
fn small_convergence_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = wavedg(&[
        "convergence",
        "--case",
        "1",
        "--threshold",
        "1e4",
        "--nu",
        "0.1",
        "--exponents",
        "3,4",
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    for name in ["convergence.csv", "convergence_fd.csv"] {
        let csv = fs::read_to_string(dir.path().join(name)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("h,k,sigma,nu,T_h,steps,status"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.ends_with(",blown_up")));
    }
    let cmp = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert_eq!(cmp.lines().next(), Some("h,T_h_dg,T_h_fd"));
}

#[test]
fn xi_curve_writes_long_format_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = wavedg(&["xi-curve", "--case", "2", "--cells", "16", "--levels", "300,600", "--out", &out]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    let csv = fs::read_to_string(dir.path().join("xi.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,xi_R,R"));
    assert_eq!(lines.count(), 2 * 32);
    assert!(stdout(&o).contains("fitted slope"));

    let o = wavedg(&["xi-curve", "--case", "2", "--cells", "16", "--levels", "0.5", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn benchmark_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = wavedg(&["benchmark", "--case", "1", "--cells", "16", "--nu", "0.1", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,rel_l2,rel_linf"));
    assert_eq!(csv.lines().count(), 5);
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("summary.md").exists());
}

#[test]
fn dump_matrices_scales_with_h() {
    let o = wavedg(&["dump-matrices", "--k", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"], 1);
    let o = wavedg(&["dump-matrices", "--k", "1", "--h", "0.5"]);
    assert!(o.status.success());
    let o = wavedg(&["dump-matrices", "--k", "1", "--h", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}
