//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "dying_channel.h"

int main(void) {
    DclSingleConfig *cfg = NULL;
    if (dcl_single_new(1, 1.0, 10.0, DCL_FADING_RAYLEIGH, 1.0, 0.2, &cfg) != DCL_STATUS_OK) return 1;
    double lo = 0, hi = 0;
    if (dcl_single_bounds(cfg, &lo, &hi) != DCL_STATUS_OK) return 2;
    DclEstimate est;
    if (dcl_single_mc(cfg, NULL, 10000, 3, &est) != DCL_STATUS_OK) return 3;
    dcl_single_free(cfg);
    if (dcl_single_new(0, 1.0, 10.0, DCL_FADING_RAYLEIGH, 1.0, 0.2, &cfg) != DCL_STATUS_PRECONDITION) return 4;
    if (dcl_last_error_message() == NULL) return 5;
    printf("%.12f %.12f %llu\n", lo, hi, (unsigned long long)est.trials);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests/<exe> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let lib = target_dir().join("libdying_channel_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "program exited with {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(v.len(), 3);
    assert_eq!(v[0], v[1]);
    assert_eq!(v[2], "10000");
}
