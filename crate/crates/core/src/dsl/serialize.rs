use std::fmt::Write;

use rust_decimal::Decimal;

use super::lexer::{is_word_char, looks_numeric};
use crate::eval::Scenario;
use crate::functions::{Interpolation, TableFunction};
use crate::model::*;

/// Canonical text of a model: blocks grouped by kind, sorted by id, two-space
/// indentation, LF line endings. An empty model gives empty text.
pub fn serialize(model: &GoalModel) -> String {
    serialize_project(model, &[])
}

/// Canonical text of a model followed by scenario blocks (sorted by id).
pub fn serialize_project(model: &GoalModel, scenarios: &[Scenario]) -> String {
    let mut blocks: Vec<String> = Vec::new();
    for o in model.objectives.values() {
        blocks.push(objective(model, o));
    }
    for r in model.requirements.values() {
        blocks.push(requirement(model, r));
    }
    for s in model.softgoals.values() {
        let mut b = Block::open("softgoal", s.id.as_str());
        b.field("statement", quoted(&s.statement));
        b.field("level", s.level.as_str());
        blocks.push(b.close());
    }
    for bl in model.beliefs.values() {
        let mut b = Block::open("belief", bl.id.as_str());
        b.field("statement", quoted(&bl.statement));
        b.field("attached_to", word(bl.attached_to.as_str()));
        blocks.push(b.close());
    }
    for l in model.contributions.values() {
        if let Quantification::Multi { function } = &l.quantification {
            blocks.push(table_function("function", l.id.as_str(), function));
        }
    }
    for l in model.contributions.values() {
        blocks.push(link(l));
    }
    for (id, f) in &model.utilities {
        blocks.push(table_function("utility", id.as_str(), f));
    }
    if !model.root_weights.is_empty() {
        let mut out = String::from("weights {\n");
        for (id, w) in &model.root_weights {
            let _ = writeln!(out, "  {}: {}", word(id.as_str()), num(*w));
        }
        out.push_str("}\n");
        blocks.push(out);
    }
    let mut sorted: Vec<&Scenario> = scenarios.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    for s in sorted {
        blocks.push(scenario(s));
    }
    blocks.join("\n")
}

struct Block {
    out: String,
}

impl Block {
    fn open(kind: &str, id: &str) -> Self {
        Block { out: format!("{kind} {} {{\n", word(id)) }
    }

    fn field(&mut self, key: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.out, "  {key}: {}", value.as_ref());
    }

    fn list(&mut self, key: &str, items: &[String]) {
        let _ = writeln!(self.out, "  {key} = [{}]", items.join(", "));
    }

    fn close(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

fn num(d: Decimal) -> String {
    d.normalize().to_string()
}

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A bare token when it would lex back as the same word, else quoted.
fn word(s: &str) -> String {
    if !s.is_empty() && s.chars().all(is_word_char) && !looks_numeric(s) && s != "+-" {
        s.to_string()
    } else {
        quoted(s)
    }
}

fn objective(model: &GoalModel, o: &Objective) -> String {
    let mut b = Block::open("objective", o.id.as_str());
    b.field("activity", word(&o.activity));
    if !o.object.is_empty() {
        b.field("object", quoted(&o.object));
    }
    b.field("focus", quoted(&o.focus));
    b.field("direction", o.magnitude.direction.as_str());
    b.field("target", num(o.magnitude.target));
    b.field("threshold", num(o.magnitude.threshold));
    if let Some(a) = o.magnitude.as_is {
        b.field("as_is", num(a));
    }
    b.field("unit", word(&o.scale.unit));
    b.field("kind", o.scale.kind.as_str());
    for (key, value) in
        [("scale", &o.scale.description), ("timeframe", &o.timeframe), ("scope", &o.scope), ("author", &o.author)]
    {
        if !value.is_empty() {
            b.field(key, quoted(value));
        }
    }
    if let Some(w) = o.worst {
        b.field("worst", num(w));
    }
    if let Some(v) = o.best {
        b.field("best", num(v));
    }
    decomposes(model, &o.id, &mut b);
    let traces: Vec<String> = model.traces.iter().filter(|t| t.from == o.id).map(|t| word(t.to.as_str())).collect();
    if !traces.is_empty() {
        b.list("traces", &traces);
    }
    b.close()
}

fn decomposes(model: &GoalModel, child: &Id, b: &mut Block) {
    if let Some(d) = model.decompositions.iter().find(|d| &d.child == child) {
        b.field("decomposes", word(d.parent.as_str()));
    }
}

fn requirement(model: &GoalModel, r: &Requirement) -> String {
    let mut b = Block::open("requirement", r.id.as_str());
    b.field("kind", r.kind.as_str());
    b.field("headline", quoted(&r.headline));
    b.field("fit", quoted(&r.fit.text));
    if let Some(m) = &r.fit.metric {
        b.field("metric", quoted(m));
    }
    if let Some(u) = &r.fit.unit {
        b.field("fit_unit", word(u));
    }
    if let Some(t) = r.fit.target {
        b.field("fit_target", num(t));
    }
    if !r.description.is_empty() {
        b.field("description", quoted(&r.description));
    }
    if !r.rationale.is_empty() {
        b.field("rationale", quoted(&r.rationale));
    }
    decomposes(model, &r.id, &mut b);
    b.close()
}

fn confidence(c: &Confidence) -> String {
    match c.label {
        Some(p) if p.value() == c.value => p.as_str().to_string(),
        _ => num(c.value),
    }
}

fn link(l: &ContributionLink) -> String {
    let mut b = Block::open("link", l.id.as_str());
    b.field("from", word(l.source.as_str()));
    b.field("to", word(l.target.as_str()));
    b.field("effect", l.effect.as_str());
    match &l.quantification {
        Quantification::SinglePoint { estimate } => match estimate.halfwidth {
            Some(h) => b.field("amount", format!("{} ± {}", num(estimate.point), num(h))),
            None => b.field("amount", num(estimate.point)),
        },
        Quantification::Multi { .. } => b.field("function", word(l.id.as_str())),
    }
    b.field("unit", word(&l.unit));
    b.field("confidence", confidence(&l.confidence));
    if let Some(g) = &l.group {
        b.field("group", word(g.id.as_str()));
        b.field("mode", g.mode.as_str());
    }
    if !l.description.is_empty() {
        b.field("description", quoted(&l.description));
    }
    b.close()
}

fn table_function(kind: &str, id: &str, f: &TableFunction) -> String {
    let mut b = Block::open(kind, id);
    let interp = match f.interpolation {
        Interpolation::Cardinal { tension } => format!("cardinal({})", num(tension)),
        other => other.name().to_string(),
    };
    b.field("interpolation", interp);
    b.field("extrapolation", f.extrapolation.name());
    let points: Vec<String> = f.points.iter().map(|(x, y)| format!("({}, {})", num(*x), num(*y))).collect();
    b.list("points", &points);
    b.close()
}

fn scenario(s: &Scenario) -> String {
    let mut b = Block::open("scenario", &s.id);
    let f = |v: f64| format!("{v}");
    let levels: Vec<String> =
        s.requirement_levels.iter().map(|(k, v)| format!("{} = {}", word(k.as_str()), f(*v))).collect();
    if !levels.is_empty() {
        b.list("levels", &levels);
    }
    let select: Vec<String> =
        s.or_selections.iter().map(|(k, v)| format!("{} = {}", word(k.as_str()), word(v.as_str()))).collect();
    if !select.is_empty() {
        b.list("select", &select);
    }
    let conf: Vec<String> =
        s.confidence_override.iter().map(|(k, c)| format!("{} = {}", word(k.as_str()), confidence(c))).collect();
    if !conf.is_empty() {
        b.list("confidence", &conf);
    }
    let pin: Vec<String> = s.pinned.iter().map(|(k, v)| format!("{} = {}", word(k.as_str()), f(*v))).collect();
    if !pin.is_empty() {
        b.list("pin", &pin);
    }
    b.field("confidence_adjust", if s.options.confidence_adjust { "on" } else { "off" });
    b.field("proration", if s.options.single_point_proration { "on" } else { "off" });
    b.field("or", s.options.or_policy.as_str());
    b.close()
}
