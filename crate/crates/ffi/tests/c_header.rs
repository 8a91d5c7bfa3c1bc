//! Compiles a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

fn artifact_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hecke.h")).unwrap();
    for name in [
        "hk_algebra_new",
        "hk_algebra_free",
        "hk_module_induced",
        "hk_module_dual",
        "hk_module_is_isomorphic",
        "hk_run_fixture",
        "hk_ss_solve",
        "hk_last_error",
        "typedef struct HkModule HkModule",
        "HK_STATUS_INVALID_ARGUMENT = 2",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = artifact_dir().join("libhecke_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hecke_smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let status = Command::new("cc")
        .arg(format!("{manifest}/tests/c/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("cc available");
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
