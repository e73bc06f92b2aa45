use std::process::{Command, Output};

fn qfourier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfourier")).args(args).output().expect("spawn qfourier")
}

#[test]
fn plancherel_passes_and_emits_json() {
    let out = qfourier(&["plancherel", "--dual", "suq2", "--q", "0.5", "--kmax", "4", "--seed", "7", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["meta"]["subcommand"], "plancherel");
    assert_eq!(doc["verdict"]["pass"], true);
    assert_eq!(doc["sidecar"]["content_hash"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 failed"));
}

#[test]
fn same_seed_same_hash() {
    let args = ["pairing", "--seed", "3", "--trials", "10"];
    let hash = |o: Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["sidecar"]["content_hash"].clone();
    assert_eq!(hash(qfourier(&args)), hash(qfourier(&args)));
}

#[test]
fn csv_output() {
    let out = qfourier(&["growth", "--kmax", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("check") && header.contains("ratio"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn out_file_gets_the_report() {
    let path = std::env::temp_dir().join(format!("qfourier-cli-{}.json", std::process::id()));
    let out = qfourier(&["characters", "--kmax", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("checks, 0 failed"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(doc["meta"]["subcommand"], "characters");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qfourier(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qfourier(&["plancherel", "--bogus"]).status.code(), Some(2));
    assert_eq!(qfourier(&["plancherel"]).status.code(), Some(2), "missing seed");
    assert_eq!(qfourier(&["plancherel", "--seed", "1", "--dual", "z0"]).status.code(), Some(2));
    assert_eq!(qfourier(&["plancherel", "--seed", "1", "--q", "1.5"]).status.code(), Some(2));
}
