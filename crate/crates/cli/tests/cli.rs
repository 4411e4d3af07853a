//! End-to-end checks of the binary: golden table, exit codes and output
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rank1flow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn models_matches_golden_file() {
    let out = run(&["models", "--max-m", "5"]);
    assert!(out.status.success());
    let golden = std::fs::read(repo_root().join("models.golden.csv")).expect("golden file");
    assert_eq!(out.stdout, golden, "models output must match models.golden.csv byte for byte");
    // 15 catalog rows plus the header.
    assert_eq!(out.stdout.iter().filter(|&&b| b == b'\n').count(), 16);
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let a = run(&["spectrum", "--family", "real", "--m", "4"]);
    let b = run(&["spectrum", "--family", "real", "--m", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let a = run(&["stability", "--family", "real", "--m", "4", "--dr", "0.125", "--count", "5"]);
    let b = run(&["stability", "--family", "real", "--m", "4", "--dr", "0.125", "--count", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn octonion_spectrum_reads_from_table() {
    let out = run(&["spectrum", "--family", "octonion", "--m", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("octonion,2,table,4,"));
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["flow", "--config", "/nonexistent/missing.cfg"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["models"]); // missing required --max-m
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["models", "--max-m", "5", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validation_errors_exit_2() {
    let dir = std::env::temp_dir().join("rank1flow-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cfg");
    std::fs::write(&bad, "[model]\nfamily = real\nm = 4\n[grid]\ndr = 0\n").unwrap();
    let out = run(&["flow", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("grid.dr"), "{err}");

    let out = run(&["models", "--max-m", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["spectrum", "--family", "nonesuch", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_flow_run_exits_0_with_exact_columns() {
    let dir = std::env::temp_dir().join("rank1flow-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("short.cfg");
    std::fs::write(
        &cfg,
        "[model]\nfamily = real\nm = 4\n[grid]\ndr = 0.125\n[run]\nt_end = 0.05\nmonitor_stride = 4\n",
    )
    .unwrap();
    let out = run(&["flow", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,sup_h,sup_weighted_h,sup_grad_h,min_R_gap,sup_weighted_W,V,dV_dt_lhs,dV_dt_rhs"
    );
    for line in lines {
        assert_eq!(line.split(',').count(), 9);
    }
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
