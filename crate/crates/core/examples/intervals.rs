//! Propagates the `2 ± 1 FTE` spread on link H through the graph.
//!
//! cargo run --example intervals

use goalgraph::dsl;
use goalgraph::eval::evaluate_interval;
use goalgraph::whatif::objective_ids;

fn main() {
    let parsed = dsl::parse(include_str!("../fixtures/parts_interval.goal")).expect("fixture parses");
    let base = parsed.scenarios.iter().find(|s| s.id == "base").expect("base scenario");
    let result = evaluate_interval(&parsed.model, base).expect("evaluates");
    let intervals = result.interval_results.as_ref().expect("interval results");

    println!("{:<6} {:>8} {:>8} {:>8}  pessimistic / optimistic", "node", "point", "lo", "hi");
    for id in objective_ids(&parsed.model) {
        let iv = &intervals[id];
        println!(
            "{id:<6} {:>8.3} {:>8.3} {:>8.3}  {} / {}{}",
            result.achieved(id.as_str()).unwrap_or(f64::NAN),
            iv.lo,
            iv.hi,
            iv.pessimistic.as_str(),
            iv.optimistic.as_str(),
            if iv.approximate { " (approximate)" } else { "" }
        );
    }
}
