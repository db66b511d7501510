use std::fs;
use std::process::{Command, Output};

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .output()
        .expect("spawn hecke")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn symbol_values() {
    let o = hecke(&["symbol", "--a", "i", "--n", "-1-2i"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1");
    let o = hecke(&["symbol", "--a", "1", "--n", "7"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = hecke(&["symbol", "--a", "3+2i", "--n", "3+2i"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn domain_and_usage_errors_exit_2() {
    assert_eq!(hecke(&["symbol", "--a", "2", "--n", "2"]).status.code(), Some(2));
    assert_eq!(hecke(&["symbol", "--a", "2", "--n", "0"]).status.code(), Some(2));
    assert_eq!(hecke(&["symbol", "--a", "x", "--n", "7"]).status.code(), Some(2));
    assert_eq!(hecke(&["moments", "--bogus"]).status.code(), Some(2));
    assert_eq!(hecke(&["verify", "nothing"]).status.code(), Some(2));
}

#[test]
fn help_lists_flags() {
    let o = hecke(&["moments", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let h = stdout(&o);
    for flag in ["--grid", "--tol", "--workers", "--primary-only", "--stretch", "--out", "--config", "--constants"] {
        assert!(h.contains(flag), "missing {flag}");
    }
}

#[test]
fn gauss_suite_passes() {
    let o = hecke(&["verify", "gauss", "--nmax", "100", "--pmax", "30", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn moments_outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = hecke(&["moments", "--grid", "30,60", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let csv = fs::read_to_string(a.path().join("moments.csv")).unwrap();
    assert!(csv.starts_with("X,count,S1,S2,S3,S4,ratio4,seconds\n"));
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(csv, fs::read_to_string(b.path().join("moments.csv")).unwrap());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("moments.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["rows"].as_array().unwrap().len(), 2);
    assert!(a.path().join("moments.gp").exists());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "grid = 20\nworkers = 2\njson = false\n").unwrap();
    let out = dir.path().join("out");
    let o = hecke(&[
        "moments",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "25",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("moments.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("25,"));
    assert!(!out.join("moments.json").exists());
    let saved = fs::read_to_string(out.join("moments.cfg")).unwrap();
    assert!(saved.contains("workers = 2"));
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(hecke(&["moments", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn constants_print() {
    let o = hecke(&["moments", "--constants"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("a4 = 2.448"));
    assert!(s.contains("C4 = "));
}
