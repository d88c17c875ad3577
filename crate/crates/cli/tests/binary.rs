use std::fs;
use std::process::Command;

fn wavesteer(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wavesteer")).args(args).output().unwrap()
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out").to_string_lossy().into_owned();
    let ok = write_config(dir.path(), "ok.json", r#"{"N": 2, "M": 2, "P": 33, "preset": "paper_example"}"#);
    let one = write_config(dir.path(), "one.json", r#"{"N": 4, "M": 1, "preset": "paper_example"}"#);
    let bad = write_config(dir.path(), "bad.json", r#"{"N": 0, "M": 2, "preset": "zero"}"#);
    let unknown = write_config(dir.path(), "unknown.json", r#"{"N": 2, "M": 2, "preset": "zero", "colour": 1}"#);

    let r = wavesteer(&["solve", "--config", &ok, "--out", &out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let r = wavesteer(&["solve", "--config", &one, "--out", &out]);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("minimal controllability time"));
    let r = wavesteer(&["solve", "--config", &bad, "--out", &out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("N: must be at least 1"));
    let r = wavesteer(&["solve", "--config", &unknown, "--out", &out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("colour"));
    let r = wavesteer(&["solve", "--config", &ok, "--out", &out, "--p-grid", "16"]);
    assert_eq!(r.status.code(), Some(2));
    let r = wavesteer(&["solve", "--config", &ok, "--out", &out, "--solver", "nope"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "c.json", r#"{"N": 2, "M": 2, "preset": "paper_example"}"#);
    let r = wavesteer(&[
        "solve", "--config", &cfg, "--out", out.to_str().unwrap(), "--p-grid", "33", "--solver", "el", "--dump-matrices",
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["P"], 33);
    assert_eq!(json["config"]["solver"], "euler_lagrange");
    assert!(json["result"]["solvers"]["qp"].is_null());
    assert!(out.join("matrix_C.csv").exists());
}

#[test]
fn sweep_and_verify_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "c.json", r#"{"N": 4, "M": 4, "P": 33, "preset": "paper_example", "oracle": {"levels": [16, 32]}}"#);
    let r = wavesteer(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--m-range", "2:3", "--n-range", "3:4"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("N=4 M=3"));
    assert!(out.join("sweep.csv").exists());
    let r = wavesteer(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--m-range", "3"]);
    assert_eq!(r.status.code(), Some(2));
    let r = wavesteer(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert_eq!(r.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("PASS oracle_convergence_order"));
    assert!(out.join("verify.json").exists());
}
