//! Shared generators, oracles and property bodies for the integration tests.

#![allow(dead_code)]

pub mod dot;
pub mod oracle;
pub mod props;

use std::path::{Path, PathBuf};

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

pub fn golden(name: &str) -> String {
    fixture(&format!("golden/{name}"))
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the built binary from the crate root.
pub fn run_cli(args: &[&str]) -> Output {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_goalgraph"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("GOALGRAPH_PORT")
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// The golden cases: file name and the arguments that produce it.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("validate.txt", &["validate", "fixtures/parts.goal"]),
    ("validate_cyclic.txt", &["validate", "fixtures/cyclic.goal"]),
    ("eval_base.txt", &["eval", "fixtures/parts.goal", "--scenario", "base"]),
    ("eval_base_no_confidence.txt", &["eval", "fixtures/parts.goal", "--scenario", "base", "--no-confidence"]),
    ("eval_base.json", &["eval", "fixtures/parts.goal", "--scenario", "base", "--json"]),
    ("report_base.md", &["report", "fixtures/parts.goal", "--scenario", "base"]),
    ("report_base.csv", &["report", "fixtures/parts.goal", "--scenario", "base", "--csv"]),
    ("render.dot", &["render", "fixtures/parts.goal"]),
    ("render_base.dot", &["render", "fixtures/parts.goal", "--result", "--scenario", "base"]),
];
