use std::path::PathBuf;
use std::process::{Command, Output};

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke")).args(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn passing_run_exits_zero() {
    let out = hecke(&["run", "sl2.trivial", "gl2.steinberg"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("sl2.trivial  PASS"), "{text}");
    assert!(text.contains("cite: GL2, Steinberg representation"), "{text}");
    assert!(text.ends_with("overall: pass\n"));
}

#[test]
fn structured_output_is_byte_identical() {
    let args = ["--format", "structured", "--p", "7", "run", "sl2.ps", "gl3.steinberg"];
    let a = hecke(&args);
    let b = hecke(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["reports"][0]["config"]["p"], 7);
    assert!(v["reports"][0].get("elapsed_ms").is_none());
}

#[test]
fn timing_is_opt_in() {
    let out = hecke(&["--format", "structured", "--timing", "run", "sl2.trivial"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["reports"][0]["elapsed_ms"].is_u64());
}

#[test]
fn split_assumption_exits_one() {
    let out = hecke(&["run", "gl3.steinberg", "--assume-split"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("contradiction at"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["run", "gl2.nothing"],
        vec!["--p", "11", "run", "sl2.trivial"],
        vec!["--p", "6", "--any-p", "run", "sl2.trivial"],
        vec!["--q", "27", "--p", "5", "run", "sl2.trivial"],
        vec!["--p", "3", "--any-p", "run", "sl2.trivial"],
        vec!["classify", "--group", "GL5", "--dim", "1"],
        vec!["run"],
        vec!["frobnicate"],
    ] {
        assert_eq!(hecke(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn other_primes_need_a_flag() {
    assert_eq!(hecke(&["--p", "11", "--any-p", "run", "sl2.trivial"]).status.code(), Some(0));
}

#[test]
fn extension_fields() {
    let out = hecke(&["--q", "25", "--format", "structured", "run", "sl2.trivial"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reports"][0]["config"]["q"], 25);
}

#[test]
fn list_and_dump() {
    let out = hecke(&["--format", "structured", "list"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
    let out = hecke(&["dump-algebra", "--group", "SL2", "--max-length", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# structure constants for SL2"));
    assert_eq!(text.lines().count(), 1 + 12 * 12);
}

#[test]
fn ss_solve_reports_facts_and_contradictions() {
    let dir = tmp("ss_solve");
    let page = dir.join("gl3.page");
    std::fs::write(&page, "cd = 9\nrows = 2 3\ncols = 0..9\nE2 0 2 = triv\nE2 9 2 = triv\nassume split: E2 7 3 >= 2\n").unwrap();
    let out = hecke(&["ss-solve", page.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("abutment 2 ≅ E2(0,2) = triv"), "{text}");
    let out = hecke(&["ss-solve", page.to_str().unwrap(), "--assume-split"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(hecke(&["ss-solve", "/nonexistent/page"]).status.code(), Some(2));
}

#[test]
fn classify_counts_supersingular_modules() {
    let out = hecke(&["--format", "structured", "classify", "--group", "GL2", "--dim", "2", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ss = v["modules"].as_array().unwrap().iter().filter(|m| m["supersingular"] == true).count();
    assert_eq!(ss, 1);
}

#[test]
fn fixture_directory_override() {
    let dir = tmp("fixtures_ok");
    std::fs::write(
        dir.join("mine.fix"),
        "[fixture my.triv] cite \"local\" group SL2\nbuild\n  let t = triv\nend\nexpect\n  iso dual(t) ~ t\nend\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hecke")).env("HECKE_FIXTURE_DIR", &dir).args(["list"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with("my.triv"));
    let out = Command::new(env!("CARGO_BIN_EXE_hecke")).env("HECKE_FIXTURE_DIR", &dir).args(["run", "all"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let bad = tmp("fixtures_bad");
    std::fs::write(bad.join("a.fix"), "[fixture dup.x] cite \"a\" group SL2\n").unwrap();
    std::fs::write(bad.join("b.fix"), "[fixture dup.x] cite \"b\" group SL2\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hecke")).env("HECKE_FIXTURE_DIR", &bad).args(["list"]).output().unwrap();
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("registered twice"));
}
