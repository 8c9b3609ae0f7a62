use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fermion-shadows"));
    c.env("RAYON_NUM_THREADS", "2");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let o = run(args, dir);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

/// Data rows of a CSV with `#` header lines.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn count_matches_known_values() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["count", "--strategy", "eqot", "--k", "4", "--modes", "8"], dir.path());
    assert!(out.lines().any(|l| l.starts_with("# command: count")));
    assert_eq!(rows(&out), vec![vec!["eqot", "8", "4", "1215"]]);
    let all = ok(&["count", "--k", "2", "--modes", "8"], dir.path());
    assert!(rows(&all).iter().any(|r| r[0] == "mt2" && r[3] == "6833"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let o = run(&["plan", "--modes", "4", "--k", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["count", "--strategy", "bogus", "--k", "2", "--modes", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["plan", "--modes", "4", "--k", "5", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_and_malformed_files_exit_4() {
    let dir = TempDir::new().unwrap();
    let o = run(&["variance", "--hamiltonian", "nope.txt", "--expectation", "0"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    std::fs::write(dir.path().join("bad.json"), "{\"fock\": [1, 0").unwrap();
    ok(&["plan", "--modes", "2", "--k", "1", "--r", "1", "--seed", "1", "--output", "p.json"], dir.path());
    let o = run(&["estimate", "--state", "bad.json", "--plan", "p.json", "--shots", "1", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn small_plan_needs_three_settings() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["plan", "--modes", "2", "--k", "1", "--r", "1", "--seed", "1", "--output", "p.json"], dir.path());
    let k1: usize = out.split_whitespace().next().unwrap().trim_start_matches("K_1=").parse().unwrap();
    assert!(k1 >= 3, "{out}");
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(plan["settings"].as_array().unwrap().len(), k1);
}

#[test]
fn plan_and_estimate_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.json"), r#"{"fock": [1, 0, 1]}"#).unwrap();
    for (plan, ens) in [("a.json", "fgu"), ("b.json", "fgu"), ("c.json", "nc"), ("d.json", "nc")] {
        let args = format!("plan --modes 3 --k 1 --ensemble {ens} --mapping bk --r 5 --seed 42 --output {plan}");
        ok(&args.split_whitespace().collect::<Vec<_>>(), d);
    }
    let read = |p: &str| std::fs::read(d.join(p)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("c.json"), read("d.json"));

    for out in ["r1.csv", "r2.csv"] {
        ok(&["estimate", "--state", "s.json", "--plan", "c.json", "--shots", "20", "--seed", "9", "--output", out], d);
    }
    assert_eq!(read("r1.csv"), read("r2.csv"));
    assert_eq!(read("r1.json"), read("r2.json"));
    let other = ok(&["estimate", "--state", "s.json", "--plan", "c.json", "--shots", "20", "--seed", "10"], d);
    assert_ne!(other.as_bytes(), &read("r1.csv")[..]);
}

#[test]
fn zero_shots_is_an_error() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.json"), r#"{"fock": [1, 0]}"#).unwrap();
    ok(&["plan", "--modes", "2", "--k", "1", "--r", "1", "--seed", "3", "--output", "p.json"], d);
    let o = run(&["estimate", "--state", "s.json", "--plan", "p.json", "--shots", "0", "--seed", "1"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shots"));
}

/// `|1100⟩` at n = 4, k = 1. FGU settings map Fock states to Fock states, so
/// accuracy is set by the plan size rather than the shot count.
#[test]
fn fock_state_one_rdm_diagonal() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.json"), r#"{"fock": [1, 1, 0, 0]}"#).unwrap();
    ok(&["plan", "--modes", "4", "--k", "1", "--r", "1000", "--seed", "7", "--output", "p.json"], d);
    let csv = ok(&["estimate", "--state", "s.json", "--plan", "p.json", "--shots", "4", "--seed", "1"], d);
    assert!(csv.contains("# shots_per_setting: 4"));
    let diag: Vec<f64> = rows(&csv).into_iter().filter(|r| r[0] == r[1]).map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(diag.len(), 4);
    for (got, want) in diag.iter().zip([1.0, 1.0, 0.0, 0.0]) {
        assert!((got - want).abs() < 0.05, "diag {diag:?}");
    }
}

#[test]
fn variance_report() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("h.txt"), "# hopping plus interaction\n-1.0 0^ 1\n-1.0 1^ 0\n0.5 0^ 1^ 1 0\n").unwrap();
    let out = ok(&["variance", "--hamiltonian", "h.txt", "--expectation", "-0.25", "--output", "v.csv"], d);
    assert!(out.is_empty());
    let csv = std::fs::read_to_string(d.join("v.csv")).unwrap();
    assert!(csv.contains("# command: variance"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("v.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["command"], "variance");
    assert!(!json["rows"].as_array().unwrap().is_empty());
}

#[test]
fn quick_validation_passes() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["validate", "--quick"], dir.path());
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn nc_eigen_table() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["nc-eigen", "--modes", "3", "--degree", "2", "--mapping", "jw"], dir.path());
    assert!(out.contains("# mapping: jw"));
    assert!(out.contains("7/81"), "{out}");
    let o = run(&["nc-eigen", "--modes", "6", "--degree", "2", "--samples", "100"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.json"), r#"{"fock": [0, 1, 1]}"#).unwrap();
    ok(&["plan", "--modes", "3", "--k", "2", "--r", "3", "--seed", "5", "--output", "p.json"], d);
    let args = ["estimate", "--state", "s.json", "--plan", "p.json", "--shots", "3", "--seed", "2"];
    let one = bin().args(["--threads", "1"]).args(args).current_dir(d).output().unwrap();
    let four = bin().args(["--threads", "4"]).args(args).current_dir(d).output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}
