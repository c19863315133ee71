//! Random small goal graphs, their DSL text, and a hop-by-hop reference
//! evaluator that works on the generator's own description rather than on
//! the library's model types.

use std::collections::BTreeMap;
use std::fmt::Write;

use proptest::prelude::*;

pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Req {
    pub id: String,
    /// Implementation level in quarters (0..=4).
    pub quarters: u8,
}

#[derive(Clone, Debug)]
pub struct Obj {
    pub id: String,
    pub increase: bool,
    pub target: i64,
    pub threshold: i64,
}

#[derive(Clone, Debug)]
pub enum Amount {
    Point { point: i64, halfwidth: i64 },
    Table { step: bool, knots: Vec<(i64, i64)> },
}

#[derive(Clone, Debug)]
pub struct Link {
    pub id: String,
    pub from: String,
    pub to: String,
    pub increase: bool,
    pub amount: Amount,
    /// Confidence in hundredths.
    pub confidence: u8,
}

#[derive(Clone, Debug)]
pub struct RandomGraph {
    pub reqs: Vec<Req>,
    pub objs: Vec<Obj>,
    pub links: Vec<Link>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleNode {
    pub raw: f64,
    pub achieved: f64,
    pub status: &'static str,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub nodes: BTreeMap<String, OracleNode>,
    /// Per link: (raw, adjusted).
    pub links: BTreeMap<String, (f64, f64)>,
    pub total_utility: f64,
}

fn knots_strategy(monotone: bool) -> impl Strategy<Value = Vec<(i64, i64)>> {
    (2usize..=4)
        .prop_flat_map(move |n| {
            let ys = if monotone {
                prop::collection::vec(0i64..=6, n).boxed()
            } else {
                prop::collection::vec(-10i64..=20, n).boxed()
            };
            (prop::collection::vec(1i64..=10, n - 1), ys, 0i64..=2)
        })
        .prop_map(move |(gaps, ys, start)| {
            let mut x = start;
            let mut out = vec![(x, 0)];
            for g in gaps {
                x += g;
                out.push((x, 0));
            }
            let mut acc = 0;
            for (p, y) in out.iter_mut().zip(ys) {
                p.1 = if monotone {
                    acc += y;
                    acc
                } else {
                    y
                };
            }
            out
        })
}

fn amount_strategy(monotone: bool, with_spread: bool) -> impl Strategy<Value = Amount> {
    let point = (1i64..=20, if with_spread { 0i64..=3 } else { 0i64..=0 })
        .prop_map(|(point, halfwidth)| Amount::Point { point, halfwidth: halfwidth.min(point) });
    let table = (any::<bool>(), knots_strategy(monotone)).prop_map(|(step, knots)| Amount::Table { step, knots });
    prop_oneof![3 => point, 2 => table]
}

/// Graphs of 1–2 requirements and 1–4 objectives. Links only run forward in
/// declaration order, so every graph is acyclic. `aligned` makes every link
/// push its target towards the target direction with non-decreasing tables.
pub fn graph_strategy(aligned: bool, with_spread: bool) -> impl Strategy<Value = RandomGraph> {
    (1usize..=2, 1usize..=4)
        .prop_flat_map(move |(nr, no)| {
            let reqs = prop::collection::vec(0u8..=4, nr);
            let objs = prop::collection::vec((any::<bool>(), 1i64..=20, 0i64..=20), no);
            let pairs = nr * no + no * (no.saturating_sub(1)) / 2;
            let links = prop::collection::vec(
                (prop::bool::weighted(0.6), any::<bool>(), amount_strategy(aligned, with_spread), 0u8..=100),
                pairs,
            );
            (reqs, objs, links)
        })
        .prop_map(move |(reqs, objs, link_specs)| {
            let reqs: Vec<Req> =
                reqs.into_iter().enumerate().map(|(i, q)| Req { id: format!("r{i}"), quarters: q }).collect();
            let objs: Vec<Obj> = objs
                .into_iter()
                .enumerate()
                .map(|(i, (increase, target, th))| Obj {
                    id: format!("o{i}"),
                    increase,
                    target,
                    threshold: th % (target + 1),
                })
                .collect();
            let mut sources: Vec<(String, bool)> = reqs.iter().map(|r| (r.id.clone(), true)).collect();
            let mut links = Vec::new();
            let mut specs = link_specs.into_iter();
            for o in &objs {
                for (src, _) in &sources {
                    let (keep, effect, amount, confidence) = specs.next().expect("enough link specs");
                    if !keep {
                        continue;
                    }
                    let increase = if aligned { o.increase } else { effect };
                    links.push(Link {
                        id: format!("l{}", links.len()),
                        from: src.clone(),
                        to: o.id.clone(),
                        increase,
                        amount,
                        confidence,
                    });
                }
                sources.push((o.id.clone(), false));
            }
            RandomGraph { reqs, objs, links }
        })
}

impl RandomGraph {
    pub fn level(&self, req: &str) -> f64 {
        self.reqs.iter().find(|r| r.id == req).map(|r| r.quarters as f64 / 4.0).unwrap_or(0.0)
    }

    pub fn to_dsl(&self) -> String {
        let mut s = String::new();
        for r in &self.reqs {
            let _ = writeln!(
                s,
                "requirement {} {{\n  kind: NF\n  headline: \"Requirement {}\"\n  fit: \"measured\"\n}}\n",
                r.id, r.id
            );
        }
        for o in &self.objs {
            let (activity, direction) = if o.increase { ("Increased", "increase") } else { ("Reduced", "reduction") };
            let _ = writeln!(
                s,
                "objective {} {{\n  activity: {activity}\n  focus: \"Quantity {}\"\n  direction: {direction}\n  target: {}\n  threshold: {}\n  unit: pts\n  kind: continuous\n}}\n",
                o.id, o.id, o.target, o.threshold
            );
        }
        for l in &self.links {
            if let Amount::Table { step, knots } = &l.amount {
                let pts: Vec<String> = knots.iter().map(|(x, y)| format!("({x}, {y})")).collect();
                let _ = writeln!(
                    s,
                    "function f{} {{\n  interpolation: {}\n  extrapolation: clamp\n  points = [{}]\n}}\n",
                    l.id,
                    if *step { "step_after" } else { "linear" },
                    pts.join(", ")
                );
            }
        }
        for l in &self.links {
            let amount = match &l.amount {
                Amount::Point { point, halfwidth: 0 } => format!("amount: {point}"),
                Amount::Point { point, halfwidth } => format!("amount: {point} ± {halfwidth}"),
                Amount::Table { .. } => format!("function: f{}", l.id),
            };
            let _ = writeln!(
                s,
                "link {} {{\n  from: {}\n  to: {}\n  effect: {}\n  unit: pts\n  {amount}\n  confidence: {}\n}}\n",
                l.id,
                l.from,
                l.to,
                if l.increase { "increase" } else { "reduction" },
                format_hundredths(l.confidence)
            );
        }
        let levels: Vec<String> =
            self.reqs.iter().map(|r| format!("{} = {}", r.id, format_quarters(r.quarters))).collect();
        let _ = writeln!(s, "scenario random {{\n  levels = [{}]\n}}", levels.join(", "));
        s
    }

    fn objective(&self, id: &str) -> Option<&Obj> {
        self.objs.iter().find(|o| o.id == id)
    }

    /// Hop-by-hop evaluation. Each node's achieved value is the sum of its
    /// incoming contributions; a contribution depends on the source's
    /// confidence-free value and is scaled only by its own link's
    /// confidence.
    pub fn oracle(&self, adjust: bool, levels: &BTreeMap<String, f64>) -> OracleResult {
        let mut nodes: BTreeMap<String, OracleNode> = BTreeMap::new();
        let mut links = BTreeMap::new();
        for r in &self.reqs {
            let level = levels.get(&r.id).copied().unwrap_or_else(|| self.level(&r.id));
            let status = if level >= 1.0 - TOL { "satisfied" } else { "unsatisfied" };
            nodes.insert(r.id.clone(), OracleNode { raw: level, achieved: level, status });
        }
        for o in &self.objs {
            let (mut raw_sum, mut adj_sum) = (0.0, 0.0);
            for l in self.links.iter().filter(|l| l.to == o.id) {
                let src = &nodes[&l.from];
                let src_full = match self.objective(&l.from) {
                    Some(so) => src.raw >= so.target as f64 - TOL,
                    None => src.raw >= 1.0 - TOL,
                };
                let sign = if l.increase == o.increase { 1.0 } else { -1.0 };
                let raw = sign
                    * match &l.amount {
                        Amount::Point { point, .. } => {
                            if src_full {
                                *point as f64
                            } else {
                                0.0
                            }
                        }
                        Amount::Table { step, knots } => table_value(*step, knots, src.raw),
                    };
                let c = l.confidence as f64 / 100.0;
                let adjusted = if adjust { raw * c } else { raw };
                links.insert(l.id.clone(), (raw, adjusted));
                raw_sum += raw;
                adj_sum += adjusted;
            }
            let status = if adj_sum >= o.target as f64 - TOL {
                "satisfied"
            } else if adj_sum >= o.threshold as f64 - TOL {
                "threshold_met"
            } else {
                "unsatisfied"
            };
            nodes.insert(o.id.clone(), OracleNode { raw: raw_sum, achieved: adj_sum, status });
        }
        let roots: Vec<&Obj> = self.objs.iter().filter(|o| !self.links.iter().any(|l| l.from == o.id)).collect();
        let total_utility =
            roots.iter().map(|o| (nodes[&o.id].achieved / o.target as f64).clamp(0.0, 1.0)).sum::<f64>()
                / roots.len() as f64;
        OracleResult { nodes, links, total_utility }
    }
}

fn format_hundredths(c: u8) -> String {
    match c {
        100 => "1".to_string(),
        c => format!("0.{c:02}"),
    }
}

fn format_quarters(q: u8) -> &'static str {
    ["0", "0.25", "0.5", "0.75", "1"][q as usize]
}

/// Piecewise table lookup with clamped ends.
pub fn table_value(step: bool, knots: &[(i64, i64)], x: f64) -> f64 {
    let pts: Vec<(f64, f64)> = knots.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x >= x0 && x < x1 {
            return if step { y0 } else { y0 + (y1 - y0) * (x - x0) / (x1 - x0) };
        }
    }
    last.1
}
