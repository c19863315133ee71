//! Finds where a diminishing-returns curve flattens.
//!
//! cargo run --example knee

use goalgraph::functions::{Extrapolation, Interpolation, TableFunction};
use goalgraph::whatif::{diminishing_returns, DEFAULT_DROP_FRACTION};

fn main() {
    let saturation = TableFunction::from_f64(
        &[(0.0, 0.0), (1.0, 40.0), (2.0, 65.0), (3.0, 75.0), (4.0, 78.0), (6.0, 80.0)],
        Interpolation::MonotoneCubic,
        Extrapolation::Clamp,
    )
    .expect("valid knots");
    for drop in [0.5, DEFAULT_DROP_FRACTION, 0.05] {
        match diminishing_returns(&saturation, drop).expect("monotone") {
            Some((x, y)) => println!("drop {drop:.2}: flattens from x = {x} (y = {y})"),
            None => println!("drop {drop:.2}: no knee"),
        }
    }
}
