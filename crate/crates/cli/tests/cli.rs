//! Command-line behavior: exit codes, schemas, and the report command.

use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_bidualkit");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn generate_writes_a_datum() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(&dir, "d.json");
    let o = run(&["generate", "--seed", "0", "--p", "3", "--k", "1", "--gamma", "3", "--rank", "1", "--primes", "2", "-o", &d]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&d).unwrap()).unwrap();
    assert_eq!(v["schema"], "bidualkit-datum/1");
    // Same seed, same bytes.
    let d2 = p(&dir, "d2.json");
    run(&["generate", "--seed", "0", "-o", &d2]);
    assert_eq!(std::fs::read(&d).unwrap(), std::fs::read(&d2).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(&dir, "d.json");
    assert_eq!(code(&run(&["generate", "-o", &d])), 2);
    let o = run(&["generate", "--seed", "0", "--p", "2", "-o", &d]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be odd"));
    assert_eq!(code(&run(&["verify", "--suite", "stark"])), 2);
    assert_eq!(code(&run(&["verify", "--seed", "0", "--suite", "nonsense"])), 2);
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn missing_and_malformed_files_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["report", &p(&dir, "absent.json")])), 3);
    assert_eq!(code(&run(&["verify", "--datum", &p(&dir, "absent.json")])), 3);
    let junk = p(&dir, "junk.json");
    std::fs::write(&junk, "{\"schema\": \"something-else/1\"}").unwrap();
    assert_eq!(code(&run(&["report", &junk])), 3);
    assert_eq!(code(&run(&["verify", "--datum", &junk])), 3);
}

#[test]
fn verify_datum_file_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(&dir, "d.json");
    assert_eq!(code(&run(&["generate", "--seed", "0", "-o", &d])), 0);
    let r = p(&dir, "r.json");
    // No tower in the file: the mrs suite generates one.
    let o = run(&["verify", "--datum", &d, "--suite", "mrs", "-o", &r]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("Thm MRS: PASS"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(v["schema"], "bidualkit-report/1");
    assert_eq!(v["config"]["seed"], 0);

    let o = run(&["report", &r]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Thm MRS: PASS"));
    let o = run(&["report", &r, "--format", "json"]);
    assert_eq!(code(&o), 0);
    let again: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(again, v);

    let mut empty = v.clone();
    empty["checks"] = Value::Array(vec![]);
    let e = p(&dir, "empty.json");
    std::fs::write(&e, serde_json::to_string(&empty).unwrap()).unwrap();
    let o = run(&["report", &e]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "no checks");
}

#[test]
fn corrupted_datum_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(&dir, "d.json");
    run(&["generate", "--seed", "0", "-o", &d]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&d).unwrap()).unwrap();
    // Change an off-diagonal entry of the cross-component table.
    let m = v["datum"]["modulus"].as_u64().unwrap();
    let x = v["datum"]["cross"][0][1].as_u64().unwrap();
    v["datum"]["cross"][0][1] = Value::from((x + 1) % m);
    let bad = p(&dir, "bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["verify", "--datum", &bad, "--suite", "axioms,stark"]);
    let out = stdout(&o);
    assert_eq!(code(&o), 1, "{out}");
    assert!(out.contains("Synthetic axioms: FAIL"));
    assert!(out.contains("witness:"));
}

#[test]
fn cap_env_skips_large_enumerations() {
    let o = Command::new(BIN).args(["verify", "--seed", "0", "--suite", "fitting"]).env("BIDUALKIT_CAP", "1").output().unwrap();
    assert_eq!(code(&o), 0);
    let o2 = Command::new(BIN).args(["verify", "--seed", "0", "--suite", "fitting"]).env("BIDUALKIT_CAP", "lots").output().unwrap();
    assert_eq!(code(&o2), 2);
}
