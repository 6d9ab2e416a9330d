//! Recorded CLI invocations shared by the golden and acceptance targets.

use std::path::PathBuf;
use std::process::Command;

pub const CASES: &[(&str, &[&str])] = &[
    ("eval_k1_succ", &["eval", "#15 #7"]),
    ("eval_skk", &["eval", "--trace", "S K K #9"]),
    ("eval_parse_error", &["eval", "K ("]),
    ("eval_free_variable", &["eval", "x"]),
    ("eval_unknown_structure", &["eval", "--pca", "bogus", "K"]),
    ("eval_exhausted", &["eval", "--fuel", "10", "S I I (S I I)"]),
    ("eval_trivial", &["eval", "--pca", "trivial", "K * *"]),
    ("eval_oracle_pca", &["eval", "--pca", "k1[double]", "QUERY #21"]),
    ("eval_kit_arithmetic", &["eval", "NSUCC (NSUCC N0)"]),
    ("abstract_identity", &["abstract", "\\x.x"]),
    ("k1_run_ifz", &["k1", "run", "IFZ #0 #4", "#5"]),
    ("s19_run_succ", &["s19", "run", "<1,1>", "7"]),
    ("s19_run_proj", &["s19", "run", "--trace", "<3,2>", "4", "5"]),
    ("s19_run_bad_index", &["s19", "run", "5", "3"]),
    ("s19_run_functional", &["s19", "run", "<8,1,<2,2,5>>", "0", "--functional", "at_zero"]),
    ("s19_run_syntax", &["s19", "run", "<1,1", "3"]),
    ("s19_compile_succ", &["s19", "compile", "<1,1>"]),
    ("oracle_double", &["oracle", "run", "--oracle", "double", "--trace", "QUERY", "#21"]),
    ("oracle_undefined", &["oracle", "run", "--oracle", "undefined_at_3", "--trace", "QUERY", "#3"]),
    ("functional_exhausted", &["functional", "run", "--functional", "at_zero", "--fuel", "5", "QUERY", "QUERY"]),
    ("strict_eval", &["strict", "eval", "K #3 #4"]),
    ("laws_k1", &["laws", "--samples", "20"]),
    ("laws_strict", &["laws", "--pca", "strict:k1", "--samples", "20"]),
    ("laws_trivial", &["laws", "--pca", "trivial", "--samples", "5"]),
    ("missing_subcommand", &[]),
];

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Standard output of `pca args`, followed by an `exit N` line.
pub fn transcript(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_pca")).args(args).output().expect("run pca");
    let mut text = String::from_utf8(out.stdout).expect("utf-8 output");
    text.push_str(&format!("exit {}\n", out.status.code().unwrap_or(-1)));
    text
}
