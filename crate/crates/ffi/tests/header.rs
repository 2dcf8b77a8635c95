//! The generated header must compile as C and declare every exported symbol.

use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ptchain.h")
}

#[test]
fn declares_every_function() {
    let text = std::fs::read_to_string(header()).unwrap();
    for f in [
        "pt_last_error",
        "pt_gamma_critical",
        "pt_scatter",
        "pt_pole_residual",
        "pt_verdict",
        "pt_poles_find",
        "pt_poles_len",
        "pt_poles_get",
        "pt_poles_free",
        "pt_propagator_new",
        "pt_propagator_dominant",
        "pt_propagator_evolve_packet",
        "pt_propagator_sites",
        "pt_propagator_free",
    ] {
        assert!(text.contains(&format!("{f}(")), "{f} missing");
    }
    assert!(text.contains("typedef struct PtPoleSet PtPoleSet;"));
}

#[test]
fn compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        r#"#include "ptchain.h"
int probe(void) {
    double g;
    PtScatter s;
    PtPoleSet *set = 0;
    if (pt_gamma_critical(3, &g) != PT_STATUS_OK) return 1;
    if (pt_scatter(3, 0.3, 1.5707963267948966, &s) != PT_STATUS_OK) return 2;
    if (pt_poles_find(3, 0.7, -3.14, 3.14, -1.5, 1.0, 50, &set) == PT_STATUS_OK) {
        PtPole p;
        if (pt_poles_len(set) > 0) pt_poles_get(set, 0, &p);
        pt_poles_free(set);
    }
    return pt_last_error() != 0;
}
"#,
    )
    .unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
