use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn header() -> PathBuf {
    root().join("include")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header().join("landscape_lab.h")).unwrap();
    for name in [
        "LL_STATUS_OK",
        "LL_STATUS_BUFFER_TOO_SMALL",
        "typedef struct LlPotential LlPotential",
        "ll_version",
        "ll_last_error_message",
        "ll_potential_generate",
        "ll_potential_from_cells",
        "ll_potential_free",
        "ll_potential_len",
        "ll_potential_cells",
        "ll_potential_l_max",
        "ll_lowest_eigenvalues",
        "ll_landscape",
        "ll_ground_ratio",
        "ll_continuum_eigenvalues",
        "ll_continuum_landscape_max",
        "ll_homogenized",
        "ll_invert_ratio",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    if !have_cc() {
        eprintln!("no C compiler, skipped");
        return;
    }
    let st = Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(header())
        .arg(root().join("tests/c/smoke.c"))
        .status()
        .unwrap();
    assert!(st.success());
}

#[test]
fn c_program_links_and_runs() {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let lib = exe
        .parent()
        .and_then(Path::parent)
        .map(|d| d.join("liblandscape_lab_ffi.a"))
        .unwrap();
    if !have_cc() || !lib.exists() {
        eprintln!("static library or C compiler unavailable, skipped");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let st = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header())
        .arg(root().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("ok"), "{stdout}");
}
