use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gpts_cli::commands::{simulate, sweep, SweepAxis};
use gpts_cli::parse_config;
use gpts_core::stats::ols_slope;

fn gpts(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpts")).current_dir(dir).args(args).output().unwrap()
}

fn finite(n: usize, horizon: usize, reps: usize) -> String {
    format!(
        "space.kind = finite\nspace.n = {n}\nlearner.kind = thompson\nlearner.sigma = sqrt(2)\n\
         adversary.kind = rademacher\ngame.horizon = {horizon}\ngame.replications = {reps}\ngame.seed = 7\n"
    )
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.cfg"), finite(10, 200, 1)).unwrap();
    for out in ["a", "b"] {
        let o = gpts(dir.path(), &["--config", "c.cfg", "--out", out, "simulate"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(dir.path().join("a/replications.csv")).unwrap();
    let b = fs::read(dir.path().join("b/replications.csv")).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("replication,seed,regret\n"));
}

#[test]
fn bad_config_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.cfg"), "space.kind = finite\nspace.n = 3\nlearner.kind = oracle\n").unwrap();
    let o = gpts(dir.path(), &["--config", "c.cfg", "simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn unknown_suite_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gpts(dir.path(), &["verify", "everything"]).status.code(), Some(2));
}

#[test]
fn verify_hessian_exits_0_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = gpts(dir.path(), &["--out", "v", "verify", "hessian"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("v/verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    for check in report["checks"].as_array().unwrap() {
        assert!(check["value"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn verify_truncnorm_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert!(gpts(dir.path(), &["--out", "v", "verify", "truncnorm"]).status.success());
}

#[test]
fn bounds_prints_the_finite_rate() {
    let dir = tempfile::tempdir().unwrap();
    let o = gpts(dir.path(), &["bounds", "--horizon", "1000", "--n", "10"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["finite"].as_f64().unwrap() - 191.941).abs() < 1e-3);
}

#[test]
fn zero_adversary_has_zero_regret() {
    let text = "space.kind = finite\nspace.n = 5\nlearner.kind = thompson\nadversary.kind = zero\n\
                game.horizon = 50\ngame.replications = 100\n";
    let sim = simulate(&parse_config(text).unwrap()).unwrap();
    assert_eq!(sim.summary.mean_regret.value, 0.0);
    assert!(sim.regrets.iter().all(|r| *r == 0.0));
}

#[test]
fn finite_rate_is_within_bound() {
    let sim = simulate(&parse_config(&finite(10, 1000, 200)).unwrap()).unwrap();
    let m = sim.summary.mean_regret;
    assert!(m.value + 3.0 * m.stderr <= 191.94, "{m:?}");
    assert_eq!(sim.summary.bound_satisfied, Some(true));
}

#[test]
fn n_sweep_is_monotone() {
    let c = parse_config(&finite(2, 500, 400)).unwrap();
    let values: Vec<String> = ["2", "10", "100"].map(String::from).to_vec();
    let rows = sweep(&c, SweepAxis::Experts, &values).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].mean_regret >= w[0].mean_regret, "{rows:?}");
    }
}

#[test]
fn t_sweep_slope_is_one_half() {
    let c = parse_config(&finite(10, 250, 200)).unwrap();
    let values: Vec<String> = ["250", "500", "1000", "2000", "4000"].map(String::from).to_vec();
    let rows = sweep(&c, SweepAxis::Horizon, &values).unwrap();
    let x: Vec<f64> = values.iter().map(|v| v.parse::<f64>().unwrap().ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_regret.ln()).collect();
    let slope = ols_slope(&x, &y);
    assert!((0.4..=0.6).contains(&slope), "slope {slope}");
}

#[test]
fn single_value_sweep_csv_matches_simulate() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.cfg"), finite(4, 100, 20)).unwrap();
    let o = gpts(dir.path(), &["--config", "c.cfg", "--out", "s", "sweep", "--axis", "T", "--values", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = gpts(dir.path(), &["--config", "c.cfg", "--out", "m", "simulate"]);
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("m/summary.json")).unwrap()).unwrap();
    let mut rows = csv::Reader::from_path(dir.path().join("s/sweep.csv")).unwrap();
    let row = rows.records().next().unwrap().unwrap();
    assert_eq!(&row[0], "T");
    assert_eq!(row[2].parse::<f64>().unwrap(), summary["mean_regret"]["value"].as_f64().unwrap());
    assert_eq!(row[3].parse::<f64>().unwrap(), summary["mean_regret"]["stderr"].as_f64().unwrap());
}
