//! Writes the base scenario as Graphviz, markdown, CSV and JSON.
//!
//! cargo run --example export [out-dir]

use std::path::PathBuf;

use goalgraph::dsl;
use goalgraph::eval::{evaluate, EvaluationResult};
use goalgraph::export::{from_json, report_csv, report_markdown, to_dot, to_json};

fn main() {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out).expect("output directory");
    let parsed = dsl::parse(include_str!("../fixtures/parts.goal")).expect("fixture parses");
    let base = parsed.scenarios.iter().find(|s| s.id == "base").expect("base scenario");
    let result = evaluate(&parsed.model, base).expect("evaluates");

    let files = [
        ("parts.dot", to_dot(&parsed.model, Some(&result))),
        ("parts.md", report_markdown(&parsed.model, &result)),
        ("parts.csv", report_csv(&parsed.model, &result)),
        ("parts.json", to_json("evaluation", &result)),
    ];
    for (name, text) in &files {
        let path = out.join(name);
        std::fs::write(&path, text).expect("writable");
        println!("wrote {} ({} bytes)", path.display(), text.len());
    }

    let back: EvaluationResult = from_json(&files[3].1, "evaluation").expect("round-trips");
    assert_eq!(back.total_utility, result.total_utility);
    println!("\n{}", files[1].1);
}
