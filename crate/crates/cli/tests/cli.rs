use std::path::Path;
use std::process::Command;

fn vnlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vnlab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn plancherel_hyp_run_passes_with_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hyp.json",
        r#"{
  "model": {"kind": "cyclic", "n": 256},
  "experiment": {"kind": "verify", "check": {"inequality": "hyp", "p": 2, "b": 2}},
  "trials": 20,
  "seed": 7
}"#,
    );
    let out = dir.path().join("out");
    let o = vnlab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ratio = header.iter().position(|h| *h == "ratio").unwrap();
    let r: f64 = row[ratio].parse().unwrap();
    assert!((r - 1.0).abs() < 1e-12, "ratio {r}");
}

#[test]
fn exponent_below_one_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{
  "model": {"kind": "cyclic", "n": 64},
  "experiment": {"kind": "verify", "check": {"inequality": "hyp", "p": 0.5, "b": 2}},
  "seed": 1
}"#,
    );
    let o = vnlab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn malformed_json_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "broken.json", "{\n  \"model\": {\"kind\": \"cyclic\", \"n\": 64,\n}\n");
    let o = vnlab(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = vnlab(&["run", "x.json", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_subcommand_requires_scan_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.json",
        r#"{
  "model": {"kind": "cyclic", "n": 64},
  "experiment": {"kind": "verify", "check": {"inequality": "hormander", "p": 2, "q": 2, "symbol": {"kind": "random_diagonal"}}},
  "trials": 4,
  "seed": 3
}"#,
    );
    let out = dir.path().join("o");
    let o = vnlab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = vnlab(&["scan", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nikolskii_json_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "nik.json",
        r#"{
  "model": {"kind": "su2", "l_max": 4},
  "experiment": {"kind": "verify", "check": {"inequality": "nikolskii", "p": 1.5, "q": 4}},
  "trials": 1000,
  "seed": 42
}"#,
    );
    let mut bodies = Vec::new();
    for w in ["1", "3", "8"] {
        let out = dir.path().join(format!("w{w}"));
        let o = vnlab(&["run", &cfg, "--workers", w, "--format", "json", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        bodies.push(std::fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "n.json",
        r#"{
  "model": {"kind": "cyclic", "n": 32},
  "experiment": {"kind": "verify", "check": {"inequality": "nikolskii", "p": 2, "q": "inf"}},
  "trials": 10,
  "seed": 1
}"#,
    );
    let out = dir.path().join("o");
    let o = vnlab(&["run", &cfg, "--seed", "99", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",99,"), "{csv}");
}

#[test]
fn fit_recovers_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("t,value\n");
    for i in 1..=6 {
        let t = 0.1 * i as f64;
        body.push_str(&format!("{t},{}\n", 2.5 * t.powf(-0.75)));
    }
    let series = write(dir.path(), "s.csv", &body);
    let o = vnlab(&["fit", &series]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let slope: f64 = stdout.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((slope + 0.75).abs() < 1e-12);
}

#[test]
fn fit_rejects_nonpositive_values() {
    let dir = tempfile::tempdir().unwrap();
    let series = write(dir.path(), "s.csv", "1,1\n2,0\n3,1\n");
    assert_eq!(vnlab(&["fit", &series]).status.code(), Some(2));
}

#[test]
fn single_rung_scan_is_vacuous_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "scan.json",
        r#"{
  "model": {"kind": "cyclic", "n": 64},
  "experiment": {"kind": "scan", "ladder": [64], "check": {"inequality": "hyp", "p": 1.5, "b": 3}},
  "trials": 10,
  "seed": 5
}"#,
    );
    let out = dir.path().join("o");
    let o = vnlab(&["scan", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}
