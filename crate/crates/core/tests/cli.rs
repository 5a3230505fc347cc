use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fklab");

fn fklab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn fklab")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = fklab(&["validate", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("\"failed\": 0"), "{summary}");
    assert!(dir.path().join("validate.csv").exists());
    assert!(dir.path().join("validate.json").exists());
}

#[test]
fn oversized_validation_is_a_size_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "big.toml", "experiment = \"validate\"\nn = 10\n");
    let out = fklab(&["validate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap().to_owned();
    for (name, body) in [
        ("unknown.toml", "experiment = \"sample\"\nbogus = 1\n"),
        ("q.toml", "experiment = \"sample\"\nq = 0.5\n"),
        ("boundary.toml", "experiment = \"sample\"\nboundary = \"sides:1,2\"\n"),
        ("syntax.toml", "experiment = \n"),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let out = fklab(&["run", "--config", &cfg, "--out", &out_dir]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fklab(&["run", "--out", &out_dir]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let body = "experiment = \"sample\"\nname = \"det\"\nq = 2.0\nn = [4, 6]\nboundary = \"wired\"\nseed = 9\nreplicas = 12\n";
    let cfg = write_config(dir.path(), "det.toml", body);
    let threaded = write_config(dir.path(), "det2.toml", &format!("{body}threads = 2\n"));
    let mut outputs = Vec::new();
    for (i, c) in [&cfg, &cfg, &threaded].iter().enumerate() {
        let sub = dir.path().join(format!("run{i}"));
        let out = fklab(&["run", "--config", c, "--out", sub.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((std::fs::read(sub.join("det.csv")).unwrap(), std::fs::read(sub.join("det.json")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    // The thread count is part of the recorded config, so only the rows
    // are compared across it.
    assert_eq!(rows(&outputs[0].0), rows(&outputs[2].0));
}

fn rows(csv: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(csv).lines().skip(1).map(str::to_owned).collect()
}

#[test]
fn seed_override_changes_the_draws() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", "experiment = \"sample\"\nname = \"s\"\nn = 6\nreplicas = 8\nseed = 1\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(fklab(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(fklab(&["sample", "--config", &cfg, "--seed", "2", "--out", b.to_str().unwrap()]).status.success());
    assert_ne!(std::fs::read(a.join("s.csv")).unwrap(), std::fs::read(b.join("s.csv")).unwrap());
}
