use std::path::PathBuf;
use std::process::{Command, Output};

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn bandinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandinv")).args(args).env_remove("BANDINV_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn residual(text: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with("residual ")).unwrap();
    line["residual ".len()..].parse().unwrap()
}

#[test]
fn invert_worked_example() {
    let o = bandinv(&["invert", "--n", "3", spec("worked.toml").to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
    assert_eq!(first, ["-1", "-0.857142857143", "-0.285714285714"]);
    assert!(residual(&text) < 1e-12);
}

#[test]
fn forward_scheme_agrees() {
    let a = bandinv(&["invert", spec("worked.toml").to_str().unwrap()]);
    let b = bandinv(&["invert", "--scheme", "forward", spec("worked.toml").to_str().unwrap()]);
    let rows = |o: &Output| stdout(o).lines().take(3).map(String::from).collect::<Vec<_>>();
    assert_eq!(rows(&a), rows(&b));
}

#[test]
fn steady_state_two_states() {
    let o = bandinv(&["steady-state", "--digits", "10", spec("two_state.toml").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap(), "0.6666666667 0.3333333333");
}

#[test]
fn validate_rejects_zero_exit_rate() {
    let o = bandinv(&["validate", spec("zero_exit.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bd_0 > 0"));
}

#[test]
fn exit_codes() {
    assert_eq!(bandinv(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bandinv(&["validate", "/no/such/file.toml"]).status.code(), Some(1));
    // infinite matrix without a block size
    assert_eq!(bandinv(&["invert", spec("homogeneous.json").to_str().unwrap()]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "bd = [1, 1]\nbu = [1]\nbz = [0, 0]\n").unwrap();
    assert_eq!(bandinv(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    let o = bandinv(&["element", spec("worked.toml").to_str().unwrap(), "0", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn element_and_json() {
    let o = bandinv(&["--format", "json", "element", spec("worked.toml").to_str().unwrap(), "2", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() + 8.0 / 7.0).abs() < 1e-15);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn homogeneous_and_absorbing() {
    let o = bandinv(&["element", spec("homogeneous.json").to_str().unwrap(), "1", "1"]);
    assert_eq!(stdout(&o).lines().next().unwrap(), "c(1,1) = -0.43933982822");
    let o = bandinv(&["absorbing-bd", "--n", "3", spec("absorbing.toml").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("c(1,1) closed form -0.707106781187"));
    assert_eq!(text.lines().nth(1).unwrap().split(' ').nth(1), Some("-0.707106781187"));
}

#[test]
fn value_function_and_steady_state_residuals() {
    let o = bandinv(&["value-function", spec("value.toml").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(residual(&stdout(&o)) < 1e-9 * 5.0);
    let o = bandinv(&["value-function", "--alpha", "0.5", "--cost", "1,-1,0,0,2", spec("value.toml").to_str().unwrap()]);
    assert!(residual(&stdout(&o)) < 1e-9 * 3.0);
    let o = bandinv(&["steady-state", "--n", "4", spec("queue.toml").to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap().split(' ').count(), 4);
    assert!(residual(&text) < 1e-10);
}

#[test]
fn eigen_reports_audit() {
    let o = bandinv(&["eigen", "--oracle", spec("worked.toml").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("gershgorin passed"));
    let d: f64 = text.lines().find_map(|l| l.strip_prefix("dense eigen distance ")).unwrap().parse().unwrap();
    assert!(d < 1e-6);
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_bandinv"))
        .args(["invert", "--n", "2", spec("homogeneous.json").to_str().unwrap()])
        .env("BANDINV_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance"));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["invert", "--exact"],
        vec!["--format", "json", "eigen", "--oracle"],
        vec!["validate"],
    ] {
        let mut a = args.clone();
        let path = spec("worked.toml");
        a.push(path.to_str().unwrap());
        assert_eq!(bandinv(&a).stdout, bandinv(&a).stdout);
    }
    let a = bandinv(&["--format", "json", "selftest", "--count", "10", "--jobs", "3"]);
    let b = bandinv(&["--format", "json", "selftest", "--count", "10", "--jobs", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let json = dir.path().join("bench.json");
    let o = bandinv(&[
        "bench", "--sizes", "16,32", "--reps", "0", "--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("instance,method,size,seconds,ops\n"));
    assert_eq!(table.lines().count(), 5);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["timings"].as_array().unwrap().len(), 0);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.txt");
    let o = bandinv(&["-o", out.to_str().unwrap(), "invert", spec("worked.toml").to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("-1 -0.857142857143"));
}
