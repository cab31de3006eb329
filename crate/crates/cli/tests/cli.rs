use std::path::Path;
use std::process::{Command, Output};

fn oneleg(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_oneleg"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .env_remove("ONELEG_NU")
        .env_remove("ONELEG_THETA")
        .env_remove("ONELEG_TAU")
        .env_remove("ONELEG_STEPS")
        .env_remove("ONELEG_SEED")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

const ZERO: &str = r#"
[run]
steps = 5
resolution = 8
[initial]
kind = "zero"
"#;

const FORCED: &str = r#"
[run]
nu = 0.2
steps = 12
resolution = 8
[initial]
seed = 3
[[forcing.modes]]
k = [1, 2]
amplitude = [[0.2, 0.0], [-0.1, 0.0]]
"#;

#[test]
fn zero_run_writes_header_and_one_row_per_step() {
    let d = tempfile::tempdir().unwrap();
    let out = oneleg(d.path(), ZERO, &["run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(d.path(), "trajectory.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert!(lines[1].starts_with("n,"));
    assert_eq!(lines.len(), 2 + 5);

    let cert = oneleg(d.path(), ZERO, &["certify"]);
    assert!(cert.status.success(), "{}", String::from_utf8_lossy(&cert.stdout));
    assert!(read(d.path(), "certificate.json").contains("\"schema\": \"oneleg-certificate/1\""));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(oneleg(d.path(), FORCED, &["run", "--seed", "9"]).status.success());
        assert!(oneleg(d.path(), FORCED, &["certify"]).status.success());
    }
    for f in ["trajectory.csv", "final_state.json", "certificate.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    let c = tempfile::tempdir().unwrap();
    assert!(oneleg(c.path(), FORCED, &["run", "--seed", "10"]).status.success());
    assert_ne!(read(a.path(), "trajectory.csv"), read(c.path(), "trajectory.csv"));
}

#[test]
fn environment_overrides_the_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("config.toml");
    std::fs::write(&cfg, ZERO).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_oneleg"))
        .args(["--config", cfg.to_str().unwrap(), "--out", d.path().join("out").to_str().unwrap(), "run"])
        .env("ONELEG_STEPS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(d.path(), "trajectory.csv").lines().count(), 2 + 3);
}

#[test]
fn corrupted_log_is_a_schema_error() {
    let d = tempfile::tempdir().unwrap();
    assert!(oneleg(d.path(), ZERO, &["run"]).status.success());
    let path = d.path().join("out").join("trajectory.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("oneleg-trajectory", "something-else", 1)).unwrap();
    assert_eq!(oneleg(d.path(), ZERO, &["certify"]).status.code(), Some(2));
    std::fs::write(&path, "n,u_l2\n1,2\n").unwrap();
    assert_eq!(oneleg(d.path(), ZERO, &["certify"]).status.code(), Some(2));
}

#[test]
fn bad_configs_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(oneleg(d.path(), "[run]\nnu = -1.0\n", &["run"]).status.code(), Some(2));
    assert_eq!(oneleg(d.path(), "[run]\nbogus = 1\n", &["run"]).status.code(), Some(2));
    assert_eq!(oneleg(d.path(), "[sweep]\ntheta = []\ntau = [0.1]\n", &["sweep"]).status.code(), Some(2));
    assert!(!d.path().join("out").join("trajectory.csv").exists());
}

#[test]
fn stalled_solver_exits_with_three_and_leaves_no_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"
[run]
nu = 0.01
tau = 0.2
steps = 5
resolution = 8
picard_max_iter = 1
newton = false
[initial]
amplitude = 20.0
"#;
    let out = oneleg(d.path(), cfg, &["run"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let left: Vec<_> = std::fs::read_dir(d.path().join("out")).unwrap().collect();
    assert!(left.is_empty());
}

#[test]
fn constants_writes_a_ledger() {
    let d = tempfile::tempdir().unwrap();
    let out = oneleg(d.path(), FORCED, &["constants", "--variant", "paper"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(d.path(), "ledger.json")).unwrap();
    assert_eq!(v["variant"], "paper_literal");
    assert!(v["ledger"]["kappa1"].as_f64().unwrap() > 0.0);
}

fn sweep_rows(d: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(d.join("out").join("sweep.csv")).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn column(d: &Path, name: &str) -> usize {
    let mut r = csv::Reader::from_path(d.join("out").join("sweep.csv")).unwrap();
    r.headers().unwrap().iter().position(|h| h == name).unwrap()
}

#[test]
fn single_point_sweep_is_one_row() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!("{FORCED}\n[sweep]\ntheta = [0.75]\ntau = [0.01]\n");
    assert!(oneleg(d.path(), &cfg, &["sweep"]).status.success());
    assert_eq!(sweep_rows(d.path()).len(), 1);
}

#[test]
fn obstruction_vanishes_at_one_half_and_the_row_is_marked() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!("{FORCED}\n[sweep]\ntheta = [0.5, 0.75]\ntau = [0.01, 6.0]\n");
    assert!(oneleg(d.path(), &cfg, &["sweep"]).status.success());
    let rows = sweep_rows(d.path());
    let (obs, status) = (column(d.path(), "obstruction"), column(d.path(), "status"));
    assert_eq!(rows[0][obs].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&rows[0][status], "domain_error");
    assert!(rows[2][obs].parse::<f64>().unwrap() > 0.0);
    assert_eq!(&rows[2][status], "ok");
    // tau = 6 breaks the step restriction for nu = 0.2.
    assert_eq!(&rows[3][status], "domain_error");
}

#[test]
fn admissibility_frontier_is_monotone_in_tau() {
    let d = tempfile::tempdir().unwrap();
    let thetas: Vec<String> = (0..20).map(|i| format!("{}", 0.52 + 0.023 * i as f64)).collect();
    let taus: Vec<String> = (0..20).map(|i| format!("{:e}", 1e-6 * 2f64.powi(i))).collect();
    let cfg = format!(
        "[run]\nnu = 10.0\nresolution = 8\n[initial]\namplitude = 0.3\n[[forcing.modes]]\nk = [1, 2]\namplitude = [[0.05, 0.0], [-0.025, 0.0]]\n[sweep]\ntheta = [{}]\ntau = [{}]\n",
        thetas.join(", "),
        taus.join(", ")
    );
    let out = oneleg(d.path(), &cfg, &["sweep", "--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = sweep_rows(d.path());
    assert_eq!(rows.len(), 400);
    let adm = column(d.path(), "admissible");
    let mut saw_true = false;
    for chunk in rows.chunks(20) {
        let flags: Vec<bool> = chunk.iter().map(|r| &r[adm] == "true").collect();
        saw_true |= flags[0];
        assert!(flags.windows(2).all(|w| w[0] || !w[1]), "{flags:?}");
    }
    assert!(saw_true);
}
