//! Parses the fixture, prints its canonical form and checks that the
//! canonical form is a fixpoint.
//!
//! cargo run --example roundtrip

use goalgraph::dsl;

fn main() {
    let parsed = dsl::parse(include_str!("../fixtures/parts.goal")).expect("fixture parses");
    let canonical = dsl::serialize_project(&parsed.model, &parsed.scenarios);
    print!("{canonical}");

    let again = dsl::parse(&canonical).expect("canonical text parses");
    assert_eq!(again.model, parsed.model);
    assert_eq!(dsl::serialize_project(&again.model, &again.scenarios), canonical);

    match dsl::parse("objective obj1 {\n  activity: Reduced\n  focus: \"Lead Time\"\n}\n") {
        Ok(_) => unreachable!(),
        Err(errors) => {
            for e in errors {
                eprintln!("{e}");
            }
        }
    }
}
