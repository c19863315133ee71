//! The four interpolation methods on the same knots, plus the fixture's
//! step curve for link H.
//!
//! cargo run --example table_functions

use goalgraph::functions::{Extrapolation, Interpolation, TableFunction};
use rust_decimal::Decimal;

fn main() {
    let knots = [(0.0, 0.0), (10.0, 1.0), (33.0, 2.0), (50.0, 3.0)];
    let methods = [
        Interpolation::StepAfter,
        Interpolation::Linear,
        Interpolation::MonotoneCubic,
        Interpolation::Cardinal { tension: Decimal::new(5, 1) },
    ];
    let functions: Vec<TableFunction> = methods
        .iter()
        .map(|m| TableFunction::from_f64(&knots, *m, Extrapolation::Clamp).expect("valid knots"))
        .collect();

    print!("{:>6}", "x");
    for m in &methods {
        print!("{:>16}", m.name());
    }
    println!();
    for x in (-5..=55).step_by(5) {
        print!("{x:>6}");
        for f in &functions {
            print!("{:>16.4}", f.evaluate(x as f64).expect("clamped"));
        }
        println!();
    }

    let hump = TableFunction::from_f64(
        &[(0.0, 0.0), (15.0, 12.0), (25.0, 10.0), (40.0, 2.0)],
        Interpolation::MonotoneCubic,
        Extrapolation::Reject,
    )
    .expect("valid knots");
    println!("\nhump monotonicity: {:?}", hump.monotonicity());
    println!("hump image of [10, 30]: {:?}", hump.propagate_interval(10.0, 30.0).expect("in domain"));
    println!("hump at 60: {:?}", hump.evaluate(60.0));
}
