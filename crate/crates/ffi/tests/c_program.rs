//! Compiles a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "mps_parent.h"

int main(void) {
    MpspTensor *t = NULL;
    if (mpsp_aklt_tensor(&t) != MPSP_STATUS_OK) return 10;
    bool holds = false;
    if (mpsp_int_holds(t, 2, 3, 1e-10, 1e-8, &holds) != MPSP_STATUS_OK || !holds) return 11;
    uintptr_t l0 = 0;
    if (mpsp_injectivity_length(t, 4, 1e-10, &l0) != MPSP_STATUS_OK || l0 != 2) return 12;
    mpsp_mps_free(t);
    if (mpsp_random_mps(0, 2, 1, &t) == MPSP_STATUS_OK) return 13;
    if (mpsp_last_error_message() == NULL) return 14;
    printf("ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmps_parent_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
