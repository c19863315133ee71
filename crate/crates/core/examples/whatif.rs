//! Side-by-side scenario comparison and a sweep of one requirement.
//!
//! cargo run --example whatif

use goalgraph::dsl;
use goalgraph::eval::Scenario;
use goalgraph::whatif::{compare, sweep, ScenarioSet};

fn main() {
    let parsed = dsl::parse(include_str!("../fixtures/parts.goal")).expect("fixture parses");
    let set = ScenarioSet::new(parsed.scenarios.clone(), "base").expect("unique scenario ids");
    let table = compare(&parsed.model, &set).expect("compares");

    print!("{:<14}", "node");
    for c in &table.columns {
        print!("{c:>18}");
    }
    println!();
    for row in &table.rows {
        print!("{:<14}", row.node);
        for cell in &row.cells {
            match (cell.achieved, cell.delta) {
                (Some(a), Some(d)) if d != 0.0 => print!("{:>18}", format!("{a:.2} ({d:+.2})")),
                (Some(a), _) => print!("{a:>18.2}"),
                _ => print!("{:>18}", "-"),
            }
        }
        println!();
    }

    let base = Scenario::all_satisfied(&parsed.model).with_selection("g12", "M");
    let swept = sweep(&parsed.model, &base, "obj6", 0.0, 50.0, 11).expect("sweeps");
    println!("\nobj6 pinned from 0 to 50:");
    for s in &swept.samples {
        println!(
            "  obj6 = {:>5.1}  obj7 = {:.2}  obj8 = {:.2}  utility = {}",
            s.input,
            s.achieved["obj7"],
            s.achieved["obj8"],
            s.total_utility.map(|u| format!("{u:.4}")).unwrap_or_else(|| "-".into())
        );
    }
}
