//! Evaluates the bundled fixture with and without confidence adjustment.
//!
//! cargo run --example evaluate

use goalgraph::dsl;
use goalgraph::eval::{evaluate, Scenario};

fn main() {
    let text = include_str!("../fixtures/parts.goal");
    let parsed = dsl::parse(text).expect("fixture parses");
    let base = parsed.scenarios.iter().find(|s| s.id == "base").expect("base scenario");

    for adjust in [true, false] {
        let scenario: Scenario = base.clone().with_confidence_adjust(adjust);
        let result = evaluate(&parsed.model, &scenario).expect("evaluates");
        println!("confidence adjustment {}", if adjust { "on" } else { "off" });
        for (id, node) in &result.nodes {
            if parsed.model.objectives.contains_key(id) {
                println!("  {id:<6} {:>8.3}  {}", node.achieved, node.status.as_str());
            }
        }
        match result.total_utility {
            Some(u) => println!("  total utility {u:.4}"),
            None => println!("  total utility indeterminate"),
        }
        for flag in &result.audit_flags {
            println!("  flag {} at {}: {}", flag.code, flag.location, flag.message);
        }
    }
    if let Some(note) = evaluate(&parsed.model, base).ok().and_then(|r| r.note) {
        println!("{note}");
    }
}
