//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "torustrace.h"

int main(void) {
    TtTorus *t = NULL;
    if (tt_torus_hex(&t) != TT_STATUS_OK) return 10;
    double z = 0.0;
    if (tt_ztilde_flat(t, &z) != TT_STATUS_OK) return 11;
    tt_torus_free(t);
    if (fabs(z + 0.2286) > 5e-4) return 12;
    if (tt_torus_new(0.0, -1.0, &t) != TT_STATUS_DOMAIN) return 13;
    if (tt_last_error()[0] == '\0') return 14;
    printf("%.6f %s\n", z, tt_version());
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libtorustrace_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let work = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = work.join("abi_check.c");
    let bin = work.join("abi_check");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("-0.2287"), "{text}");
}
