//! Compiles `tests/smoke.c` against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn cc() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

#[test]
fn header_compiles_as_c99() {
    let dir = manifest_dir();
    let status = Command::new(cc())
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .status()
        .expect("C compiler");
    assert!(status.success());
}

fn build_staticlib(target: &Path) -> PathBuf {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let status = Command::new(cargo)
        .args([
            "build",
            "--quiet",
            "-p",
            "icsim-ffi",
            "--lib",
            "--target-dir",
        ])
        .arg(target)
        .current_dir(manifest_dir())
        .status()
        .expect("cargo");
    assert!(status.success());
    target.join("debug").join("libicsim_ffi.a")
}

#[test]
fn c_program_links_and_runs() {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let lib = build_staticlib(&tmp.join("ffi-static"));
    let exe = tmp.join("icsim_smoke");
    let dir = manifest_dir();
    let status = Command::new(cc())
        .args(["-std=c99", "-O1", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
