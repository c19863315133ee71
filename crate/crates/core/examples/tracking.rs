//! Records measurements after deployment and compares them with the
//! prediction for the base scenario.
//!
//! cargo run --example tracking

use goalgraph::dsl;
use goalgraph::eval::evaluate;
use goalgraph::tracking::{append, variance_report, Measurement, MeasurementStore};
use rust_decimal::Decimal;

fn main() {
    let parsed = dsl::parse(include_str!("../fixtures/parts.goal")).expect("fixture parses");
    let base = parsed.scenarios.iter().find(|s| s.id == "base").expect("base scenario");
    let result = evaluate(&parsed.model, base).expect("evaluates");

    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("parts.goal.measurements.ndjson");
    let readings = [
        ("obj7", "2026-03-01T00:00:00Z", Decimal::new(55, 1)),
        ("obj7", "2026-09-01T00:00:00Z", Decimal::new(42, 1)),
        ("obj4", "2026-06-01T00:00:00Z", Decimal::new(7, 0)),
        ("obj8", "2026-09-01T00:00:00Z", Decimal::new(3, 0)),
    ];
    for (objective, at, value) in readings {
        let m = Measurement::new(objective, at, value).expect("valid timestamp");
        append(&path, &parsed.model, m).expect("appends");
    }
    print!("{}", std::fs::read_to_string(&path).expect("readable"));

    let store = MeasurementStore::load(&path).expect("loads");
    println!();
    for row in variance_report(&parsed.model, &store, &result) {
        println!(
            "{:<6} predicted {:>7} actual {:>7}  {}",
            row.objective,
            row.predicted.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into()),
            row.actual.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into()),
            row.verdict.as_str()
        );
    }
}
