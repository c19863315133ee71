//! Lists every contribution path from requirement 2 to a root objective.
//!
//! cargo run --example chain

use goalgraph::dsl;
use goalgraph::eval::{evaluate, summarize_chain, CHAIN_CONFIDENCE_NOTE};

fn main() {
    let parsed = dsl::parse(include_str!("../fixtures/parts.goal")).expect("fixture parses");
    let base = parsed.scenarios.iter().find(|s| s.id == "base").expect("base scenario");
    let result = evaluate(&parsed.model, base).expect("evaluates");

    for chain in summarize_chain(&parsed.model, &result, "req2") {
        let path: Vec<_> = chain.path.iter().map(|id| id.as_str()).collect();
        println!("{}  (path confidence {:.4})", path.join(" -> "), chain.path_confidence);
        for hop in &chain.hops {
            match hop.adjusted {
                Some(a) => println!("  {}: {a:.2} at confidence {:.2}", hop.link, hop.confidence),
                None => println!("  {}: not active", hop.link),
            }
        }
    }
    println!("{CHAIN_CONFIDENCE_NOTE}");
}
