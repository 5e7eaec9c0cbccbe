//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

fn liecoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liecoh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn compute_text_reports_class() {
    let out = liecoh(&[
        "compute", "--algebra", "H:2|0", "--k", "2", "--g", "-2", "--mode", "both",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("dim H = 1"));
    assert!(text.contains("p'^q'"));
    assert!(text.contains("modes agree"));
}

#[test]
fn json_is_deterministic_modulo_timing() {
    let run = || {
        let out = liecoh(&[
            "compute", "--algebra", "H:2|0", "--k", "3", "--g", "0", "--format", "json",
        ]);
        assert!(out.status.success());
        let mut v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
        let timing = v.as_object_mut().unwrap().remove("timing");
        assert!(timing.is_some(), "document carries a timing member");
        serde_json::to_string(&v).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.as_bytes(), b.as_bytes());
}

#[test]
fn jobs_flag_does_not_change_output() {
    let run = |jobs: &str| {
        let out = liecoh(&[
            "compute", "--algebra", "H:2|0", "--k", "4", "--g", "1", "--format", "json",
            "--jobs", jobs,
        ]);
        assert!(out.status.success());
        let mut v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn grid_csv_has_expected_cells() {
    let out = liecoh(&[
        "grid", "--algebra", "H:2|0", "--k", "1..5", "--g", "-2..-2", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,g,dim_c,n_subcomplexes,max_subdim,dim_h"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(
        rows,
        vec!["2,-2,1,1,1,1", "3,-2,3,3,1,0", "4,-2,3,3,1,0", "5,-2,1,1,1,1"]
    );
}

#[test]
fn explicit_algebra_from_file() {
    let out = liecoh(&[
        "compute", "--algebra", &fixture("sl2.json"), "--k", "2", "--g", "0", "--mode", "straight",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    // sl2 in grade 0: C^2_0 = {h'^..}: e'^f' and no others of grade 0 from {h,e,f}
    assert!(text.contains("mode straightforward"));
}

#[test]
fn check_passes_on_families_and_files() {
    let out = liecoh(&["check", "--algebra", "H:2|0", "--k-max", "3", "--g", "-2..1"]);
    assert!(out.status.success(), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("all checks passed"));

    let out = liecoh(&["check", "--algebra", &fixture("abelian.json")]);
    assert!(out.status.success());
}

#[test]
fn bad_inputs_fail_loudly() {
    // unknown algebra grammar and missing file
    let out = liecoh(&["compute", "--algebra", "Q:2|0", "--k", "2", "--g", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("neither a family descriptor"));

    // malformed document
    let out = liecoh(&[
        "compute", "--algebra", &fixture("bad_antisym.json"), "--k", "1", "--g", "0",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("antisymmetry"));

    let out = liecoh(&[
        "compute", "--algebra", &fixture("bad_jacobi.json"), "--k", "1", "--g", "0",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Jacobi"));

    // bad field descriptor
    let out = liecoh(&[
        "compute", "--algebra", "H:2|0", "--k", "2", "--g", "-2", "--field", "Fp:91",
    ]);
    assert!(!out.status.success());
}

#[test]
fn prime_field_mode_runs() {
    let out = liecoh(&[
        "compute", "--algebra", "H:2|0", "--k", "2", "--g", "-2", "--field", "Fp:65537",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("field Fp(65537)"));
}

#[test]
fn env_var_overrides_default_prime() {
    let out = Command::new(env!("CARGO_BIN_EXE_liecoh"))
        .args([
            "compute", "--algebra", "H:2|0", "--k", "2", "--g", "-2", "--field", "Fp",
        ])
        .env("LIECOH_PRIME", "12289")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("field Fp(12289)"));
}

#[test]
fn output_file_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("result.json");
    let out = liecoh(&[
        "compute", "--algebra", "H:2|0", "--k", "2", "--g", "-2", "--format", "json",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["results"][0]["dim_h"], 1);
}

#[test]
fn bench_reports_both_modes() {
    let out = liecoh(&["bench", "--algebra", "H:2|0", "--k", "3", "--g", "0"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("split:"));
    assert!(text.contains("straightforward:"));
}
