//! Property bodies shared by the proptest suites and the acceptance target.

use std::collections::BTreeMap;

use goalgraph::dsl;
use goalgraph::eval::{evaluate, evaluate_interval, EvaluationResult, Scenario};
use goalgraph::export::to_dot;
use goalgraph::functions::{Extrapolation, Interpolation, TableFunction};
use goalgraph::model::validate;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rust_decimal::Decimal;

use super::dot::check_dot;
use super::oracle::{graph_strategy, RandomGraph, TOL};

pub const CASES: u32 = 500;

pub fn config() -> Config {
    Config { cases: CASES, failure_persistence: None, ..Config::default() }
}

/// Runs one property with the suite configuration.
pub fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    TestRunner::new(config()).run(&strategy, test).map_err(|e| e.to_string())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * (1.0 + a.abs().max(b.abs()))
}

// ---- table functions

pub fn interpolation_strategy() -> impl Strategy<Value = Interpolation> {
    prop_oneof![
        Just(Interpolation::StepAfter),
        Just(Interpolation::Linear),
        Just(Interpolation::MonotoneCubic),
        (0u32..=10).prop_map(|t| Interpolation::Cardinal { tension: Decimal::new(t as i64, 1) }),
    ]
}

/// 2–8 knots with strictly increasing x; decimal coordinates to 2 places.
pub fn knots_strategy(monotone: bool) -> impl Strategy<Value = Vec<(Decimal, Decimal)>> {
    (2usize..=8)
        .prop_flat_map(move |n| {
            let dys = if monotone { (0i64..=5000).boxed() } else { (-5000i64..=5000).boxed() };
            (-10_000i64..=10_000, prop::collection::vec((1i64..=5000, dys), n - 1), -5000i64..=5000)
        })
        .prop_map(|(x0, steps, y0)| {
            let (mut x, mut y) = (x0, y0);
            let mut out = vec![(Decimal::new(x, 2), Decimal::new(y, 2))];
            for (dx, dy) in steps {
                x += dx;
                y += dy;
                out.push((Decimal::new(x, 2), Decimal::new(y, 2)));
            }
            out
        })
}

pub fn prop_knot_exactness((knots, method): (Vec<(Decimal, Decimal)>, Interpolation)) -> Result<(), TestCaseError> {
    let f = TableFunction::new(knots, method, Extrapolation::Reject).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for (x, y) in f.knots() {
        let v = f.evaluate(x).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(close(v, y), "{} at knot {x}: {v} != {y}", method.name());
    }
    Ok(())
}

pub fn prop_monotone_no_overshoot((knots, ts): (Vec<(Decimal, Decimal)>, Vec<f64>)) -> Result<(), TestCaseError> {
    let f = TableFunction::new(knots, Interpolation::MonotoneCubic, Extrapolation::Reject)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let k = f.knots();
    for w in k.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let mut prev = y0;
        let mut samples: Vec<f64> = ts.iter().map(|t| x0 + t * (x1 - x0)).collect();
        samples.sort_by(f64::total_cmp);
        for x in samples {
            let v = f.evaluate(x).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let (lo, hi) = (y0.min(y1), y0.max(y1));
            prop_assert!(v >= lo - TOL && v <= hi + TOL, "overshoot at {x}: {v} outside [{lo}, {hi}]");
            prop_assert!(v >= prev - TOL, "not monotone at {x}: {v} < {prev}");
            prev = v;
        }
    }
    Ok(())
}

// ---- evaluation

fn parse_graph(g: &RandomGraph) -> Result<dsl::Parsed, TestCaseError> {
    let text = g.to_dsl();
    let parsed = dsl::parse(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
    let report = validate(&parsed.model);
    if report.has_errors() {
        return Err(TestCaseError::fail(format!("{:?}\n{text}", report.errors().collect::<Vec<_>>())));
    }
    Ok(parsed)
}

fn scenario_of(parsed: &dsl::Parsed) -> Scenario {
    parsed.scenarios.iter().find(|s| s.id == "random").cloned().expect("random scenario")
}

fn eval_graph(parsed: &dsl::Parsed, adjust: bool) -> Result<EvaluationResult, TestCaseError> {
    evaluate(&parsed.model, &scenario_of(parsed).with_confidence_adjust(adjust))
        .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn random_graph() -> impl Strategy<Value = RandomGraph> {
    graph_strategy(false, false)
}

pub fn aligned_graph() -> impl Strategy<Value = RandomGraph> {
    graph_strategy(true, false)
}

pub fn spread_graph() -> impl Strategy<Value = RandomGraph> {
    graph_strategy(false, true)
}

pub fn prop_oracle_equivalence(g: RandomGraph) -> Result<(), TestCaseError> {
    let parsed = parse_graph(&g)?;
    for adjust in [true, false] {
        let result = eval_graph(&parsed, adjust)?;
        let expected = g.oracle(adjust, &BTreeMap::new());
        for (id, want) in &expected.nodes {
            let got = result.node(id).ok_or_else(|| TestCaseError::fail(format!("missing node {id}")))?;
            prop_assert!(close(got.achieved, want.achieved), "{id}: {} != {}", got.achieved, want.achieved);
            prop_assert_eq!(got.status.as_str(), want.status, "status of {}", id);
        }
        for (link, (raw, adjusted)) in &expected.links {
            let got = result.contribution(link).ok_or_else(|| TestCaseError::fail(format!("missing link {link}")))?;
            prop_assert!(close(got.raw, *raw), "{link} raw {} != {raw}", got.raw);
            prop_assert!(close(got.adjusted, *adjusted), "{link} adjusted {} != {adjusted}", got.adjusted);
        }
        let total = result.total_utility.ok_or_else(|| TestCaseError::fail("no total utility"))?;
        prop_assert!(close(total, expected.total_utility), "total {total} != {}", expected.total_utility);
    }
    Ok(())
}

pub fn prop_confidence_damping(g: RandomGraph) -> Result<(), TestCaseError> {
    let parsed = parse_graph(&g)?;
    let on = eval_graph(&parsed, true)?;
    for node in on.nodes.values() {
        for c in &node.contributions {
            prop_assert!(c.adjusted.abs() <= c.raw.abs() + TOL, "{}: |{}| > |{}|", c.link, c.adjusted, c.raw);
            prop_assert!((0.0..=1.0).contains(&c.confidence));
        }
    }
    Ok(())
}

/// Raising any one requirement's level never lowers an objective when every
/// link pushes towards its target's direction.
pub fn prop_monotone_response((g, pick, bump): (RandomGraph, usize, u8)) -> Result<(), TestCaseError> {
    let parsed = parse_graph(&g)?;
    let scenario = scenario_of(&parsed);
    let req = &g.reqs[pick % g.reqs.len()];
    let before_level = req.quarters as f64 / 4.0;
    let after_level = ((req.quarters + bump).min(4)) as f64 / 4.0;
    let before = evaluate(&parsed.model, &scenario.clone().with_level(&req.id, before_level))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let after = evaluate(&parsed.model, &scenario.with_level(&req.id, after_level))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    for o in &g.objs {
        let (a, b) = (before.achieved(&o.id).unwrap_or(0.0), after.achieved(&o.id).unwrap_or(0.0));
        prop_assert!(b >= a - TOL, "{}: {a} -> {b} when {} went {before_level} -> {after_level}", o.id, req.id);
    }
    Ok(())
}

/// Point results lie inside their intervals; spread-free models give
/// degenerate intervals equal to the point result.
pub fn prop_interval_soundness(g: RandomGraph) -> Result<(), TestCaseError> {
    let parsed = parse_graph(&g)?;
    let scenario = scenario_of(&parsed);
    let r = evaluate_interval(&parsed.model, &scenario).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let intervals = r.interval_results.as_ref().ok_or_else(|| TestCaseError::fail("no intervals"))?;
    let degenerate =
        g.links.iter().all(|l| !matches!(l.amount, super::oracle::Amount::Point { halfwidth: h, .. } if h > 0));
    for o in &g.objs {
        let iv = &intervals[o.id.as_str()];
        let p = r.achieved(&o.id).unwrap_or(f64::NAN);
        prop_assert!(iv.lo <= p + TOL && p <= iv.hi + TOL, "{}: {p} outside [{}, {}]", o.id, iv.lo, iv.hi);
        if degenerate {
            prop_assert!(close(iv.lo, p) && close(iv.hi, p), "{}: [{}, {}] != {p}", o.id, iv.lo, iv.hi);
        }
    }
    Ok(())
}

// ---- DSL and export

pub fn prop_round_trip(g: RandomGraph) -> Result<(), TestCaseError> {
    let parsed = parse_graph(&g)?;
    let once = dsl::serialize_project(&parsed.model, &parsed.scenarios);
    let again = dsl::parse(&once).map_err(|e| TestCaseError::fail(format!("{e:?}\n{once}")))?;
    prop_assert_eq!(&again.model, &parsed.model);
    prop_assert_eq!(&again.scenarios, &parsed.scenarios);
    let twice = dsl::serialize_project(&again.model, &again.scenarios);
    prop_assert_eq!(once, twice);
    Ok(())
}

/// Bytes biased towards DSL tokens so the fuzzer reaches past the lexer.
pub fn dsl_bytes() -> impl Strategy<Value = Vec<u8>> {
    let token = prop_oneof![
        any::<u8>().prop_map(|b| vec![b]),
        prop::sample::select(vec![
            "objective",
            "requirement",
            "link",
            "function",
            "scenario",
            "weights",
            "utility",
            "softgoal",
            "belief",
            "{",
            "}",
            "[",
            "]",
            "(",
            ")",
            ":",
            "=",
            ",",
            "±",
            "+/-",
            "\"",
            "#",
            "\n",
            " ",
            "1.5",
            "-3",
            "x",
            "target",
            "amount",
            "points",
            "levels",
            "cardinal(",
            "1e400",
            "\u{feff}",
            "\r\n",
        ])
        .prop_map(|s: &str| s.as_bytes().to_vec()),
    ];
    prop::collection::vec(token, 0..200).prop_map(|parts| parts.concat())
}

pub fn prop_parser_totality(bytes: Vec<u8>) -> Result<(), TestCaseError> {
    let outcome = std::panic::catch_unwind(|| {
        if let Ok(p) = dsl::parse_bytes(&bytes) {
            let _ = validate(&p.model);
        }
    });
    prop_assert!(outcome.is_ok(), "parser panicked on {:?}", String::from_utf8_lossy(&bytes));
    Ok(())
}

pub fn prop_dot_valid((g, with_result): (RandomGraph, bool)) -> Result<(), TestCaseError> {
    let parsed = parse_graph(&g)?;
    let result = if with_result { Some(eval_graph(&parsed, true)?) } else { None };
    let dot = to_dot(&parsed.model, result.as_ref());
    let summary = check_dot(&dot).map_err(|e| TestCaseError::fail(format!("{e}\n{dot}")))?;
    prop_assert!(summary.directed);
    for (a, b) in &summary.edges {
        prop_assert!(summary.nodes.contains(a) && summary.nodes.contains(b), "edge {a} -> {b} to undeclared node");
    }
    let links = parsed.model.contributions.len();
    prop_assert!(summary.edges.len() >= links);
    Ok(())
}

pub type Suite = Box<dyn Fn() -> Result<(), String>>;

/// Every AC6 suite with its strategy, in reporting order.
pub fn ac6_suites() -> Vec<(&'static str, Suite)> {
    vec![
        (
            "interpolation knot-exactness",
            Box::new(|| run((knots_strategy(false), interpolation_strategy()), prop_knot_exactness)),
        ),
        (
            "monotone-cubic no-overshoot",
            Box::new(|| {
                run((knots_strategy(true), prop::collection::vec(0.0f64..=1.0, 1..20)), prop_monotone_no_overshoot)
            }),
        ),
        ("oracle equivalence on random DAGs", Box::new(|| run(random_graph(), prop_oracle_equivalence))),
        ("confidence damping", Box::new(|| run(random_graph(), prop_confidence_damping))),
        ("monotone response", Box::new(|| run((aligned_graph(), any::<usize>(), 0u8..=4), prop_monotone_response))),
        ("DSL round-trip fixpoint", Box::new(|| run(spread_graph(), prop_round_trip))),
        ("parser totality", Box::new(|| run(dsl_bytes(), prop_parser_totality))),
        ("DOT grammar validity", Box::new(|| run((random_graph(), any::<bool>()), prop_dot_valid))),
    ]
}
