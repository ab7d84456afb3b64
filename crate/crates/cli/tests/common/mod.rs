//! Fixture commands shared by the golden and acceptance targets.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub const CASES: &[(&str, &[&str], i32)] = &[
    ("validate_a1", &["validate", "a1.json"], 0),
    ("validate_a2", &["validate", "a2.json"], 0),
    ("validate_a3", &["validate", "a3.json"], 0),
    ("validate_broken", &["validate", "broken.json"], 1),
    ("validate_a1_unshifted", &["--unshifted", "validate", "a1_unshifted.json"], 0),
    ("validate_dual_numbers", &["validate", "dual_numbers.json"], 0),
    ("validate_zero_weight", &["validate", "zero_weight.json"], 2),
    ("oracle_a2", &["oracle", "a2.json"], 0),
    ("oracle_broken", &["oracle", "broken.json"], 1),
    ("specseq_a1_page2_degree1", &["specseq", "--page", "2", "--total-degree", "1", "a1.json"], 0),
    ("specseq_a3_page2", &["specseq", "--page", "2", "a3.json"], 0),
    ("specseq_a1_page3", &["specseq", "--page", "3", "a1.json"], 2),
    ("solve_a1", &["solve-mc", "--r", "1", "a1.json"], 0),
    ("solve_a2", &["solve-mc", "--r", "1", "a2.json"], 0),
    ("solve_a3", &["solve-mc", "--r", "1", "a3.json"], 1),
    ("solve_a1_unshifted", &["--unshifted", "solve-mc", "--r", "1", "a1_unshifted.json"], 0),
    ("verify_a2_bad", &["verify", "a2.json", "a2_bad_certificate.json"], 1),
    ("defcomplex_dual_numbers", &["defcomplex", "dual_numbers.json", "dual_numbers.json", "--weight-cap", "2"], 0),
    ("formality_dual_numbers", &["formality", "dual_numbers.json", "dual_htt.json", "--weight-cap", "3"], 0),
    ("formality_dual_with_pair", &["formality", "dual_numbers.json", "dual_with_pair_htt.json", "--weight-cap", "3"], 0),
    ("formality_circle_exact_m3", &["formality", "circle.json", "circle_exact_m3_htt.json", "--weight-cap", "2"], 0),
    ("formality_massey", &["formality", "massey_h.json", "massey_htt.json", "--weight-cap", "2"], 1),
];

pub fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

pub fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lix"))
        .current_dir(dir("fixtures"))
        .env_remove("LIX_MAX_DIM")
        .args(args)
        .output()
        .expect("lix runs");
    (out.status.code().expect("exit code"), out.stdout)
}

/// Runs every case, returning `(name, exit code, stdout)`.
pub fn run_all() -> Vec<(&'static str, i32, i32, Vec<u8>, Vec<u8>)> {
    CASES
        .iter()
        .map(|&(name, args, want)| {
            let (code, first) = run(args);
            let (_, second) = run(args);
            assert_eq!(first, second, "{name}: two runs differ");
            (name, code, want, first, second)
        })
        .collect()
}
