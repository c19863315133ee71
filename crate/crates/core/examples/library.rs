//! Searches past project models for similar contributions.
//!
//! cargo run --example library [term]

use std::path::Path;

use goalgraph::library::search;

fn main() {
    let term = std::env::args().nth(1).unwrap_or_else(|| "workload".into());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/library");
    let found = search(&dir, &term).expect("library directory readable");
    println!("{} hit(s) for '{}'", found.hits.len(), found.term);
    for hit in &found.hits {
        println!("  {} {}: {} @{:.2}", hit.file, hit.link, hit.contribution, hit.confidence);
        if !hit.description.is_empty() {
            println!("    {}", hit.description);
        }
    }
    for (file, reason) in &found.skipped {
        println!("  skipped {file}: {reason}");
    }
}
