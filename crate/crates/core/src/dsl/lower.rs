//! Turns parsed blocks into a [`GoalModel`] and scenarios.

use std::collections::{BTreeMap, BTreeSet};

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;

use super::parser::{Block, BlockKind, Document, Value, ValueKind};
use super::{ParseError, SourceSpan};
use crate::eval::{OrPolicy, Scenario};
use crate::functions::{Extrapolation, Interpolation, TableFunction, DEFAULT_TENSION};
use crate::model::*;

struct Fields<'a> {
    block: &'a Block,
    used: Vec<bool>,
}

impl<'a> Fields<'a> {
    fn new(block: &'a Block, errors: &mut Vec<ParseError>) -> Self {
        let mut seen = BTreeSet::new();
        for e in &block.entries {
            if !seen.insert(e.key.as_str()) {
                errors.push(ParseError::new(
                    "PARSE_DUPLICATE_FIELD",
                    e.span,
                    format!("at most one '{}' field", e.key),
                    format!("a second '{}'", e.key),
                ));
            }
        }
        Fields { block, used: vec![false; block.entries.len()] }
    }

    fn take(&mut self, key: &str) -> Option<&'a Value> {
        let i = self.block.entries.iter().position(|e| e.key == key)?;
        self.used[i] = true;
        Some(&self.block.entries[i].value)
    }

    fn required(&mut self, key: &str, errors: &mut Vec<ParseError>) -> Option<&'a Value> {
        let v = self.take(key);
        if v.is_none() {
            errors.push(ParseError::new(
                "PARSE_MISSING_FIELD",
                self.block.span,
                format!("a '{key}' field in {} block", self.block.kind.keyword()),
                "no such field",
            ));
        }
        v
    }

    /// Entries not consumed by `take`, for blocks whose keys are data.
    fn all(&mut self) -> Vec<&'a super::parser::Entry> {
        self.used.iter_mut().for_each(|u| *u = true);
        self.block.entries.iter().collect()
    }

    fn finish(self, errors: &mut Vec<ParseError>) {
        for (e, used) in self.block.entries.iter().zip(self.used) {
            if !used {
                errors.push(ParseError::new(
                    "PARSE_UNKNOWN_FIELD",
                    e.span,
                    format!("a field of {} blocks", self.block.kind.keyword()),
                    format!("'{}'", e.key),
                ));
            }
        }
    }
}

fn bad(v: &Value, expected: &str, errors: &mut Vec<ParseError>) {
    let found = match &v.kind {
        ValueKind::Str(s) => format!("string \"{s}\""),
        ValueKind::Num(n) => format!("number {n}"),
        ValueKind::Word(w) => format!("'{w}'"),
        ValueKind::Estimate(p, h) => format!("estimate {p} ± {h}"),
        ValueKind::Call(name, _) => format!("call {name}(…)"),
        ValueKind::List(_) => "a list".into(),
        ValueKind::Tuple(_) => "a tuple".into(),
        ValueKind::Pair(k, _) => format!("pair {k} = …"),
    };
    errors.push(ParseError::new("PARSE_BAD_VALUE", v.span, expected, found));
}

fn text(v: &Value, errors: &mut Vec<ParseError>) -> Option<String> {
    match &v.kind {
        ValueKind::Str(s) | ValueKind::Word(s) => Some(s.clone()),
        ValueKind::Num(n) => Some(n.to_string()),
        _ => {
            bad(v, "text", errors);
            None
        }
    }
}

fn ident(v: &Value, errors: &mut Vec<ParseError>) -> Option<Id> {
    match &v.kind {
        ValueKind::Str(s) | ValueKind::Word(s) => Some(Id(s.clone())),
        ValueKind::Num(n) => Some(Id(n.to_string())),
        _ => {
            bad(v, "an id", errors);
            None
        }
    }
}

fn number(v: &Value, errors: &mut Vec<ParseError>) -> Option<Decimal> {
    match &v.kind {
        ValueKind::Num(n) => Some(*n),
        _ => {
            bad(v, "a number", errors);
            None
        }
    }
}

fn choice<T: Copy>(v: &Value, options: &[(&str, T)], errors: &mut Vec<ParseError>) -> Option<T> {
    if let ValueKind::Word(w) | ValueKind::Str(w) = &v.kind {
        if let Some((_, t)) = options.iter().find(|(name, _)| name == w) {
            return Some(*t);
        }
    }
    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
    bad(v, &format!("one of {}", names.join(", ")), errors);
    None
}

fn id_list(v: &Value, errors: &mut Vec<ParseError>) -> Vec<Id> {
    match &v.kind {
        ValueKind::List(items) => items.iter().filter_map(|i| ident(i, errors)).collect(),
        _ => {
            bad(v, "a list of ids", errors);
            Vec::new()
        }
    }
}

fn pairs<'v>(v: &'v Value, errors: &mut Vec<ParseError>) -> Vec<(Id, &'v Value, SourceSpan)> {
    match &v.kind {
        ValueKind::List(items) => items
            .iter()
            .filter_map(|i| match &i.kind {
                ValueKind::Pair(k, val) => Some((Id(k.clone()), val.as_ref(), i.span)),
                _ => {
                    bad(i, "'id = value'", errors);
                    None
                }
            })
            .collect(),
        _ => {
            bad(v, "a list of 'id = value' pairs", errors);
            Vec::new()
        }
    }
}

fn confidence(v: &Value, errors: &mut Vec<ParseError>) -> Option<Confidence> {
    match &v.kind {
        ValueKind::Num(n) => Some(Confidence::value(*n)),
        ValueKind::Word(w) => match ConfidencePreset::parse(w) {
            Some(p) => Some(Confidence::preset(p)),
            None => {
                bad(v, "a number or one of poor, average, great, perfect", errors);
                None
            }
        },
        _ => {
            bad(v, "a number or one of poor, average, great, perfect", errors);
            None
        }
    }
}

fn switch(v: &Value, errors: &mut Vec<ParseError>) -> Option<bool> {
    choice(v, &[("on", true), ("off", false), ("true", true), ("false", false)], errors)
}

const DIRECTIONS: &[(&str, Direction)] = &[("reduction", Direction::Reduction), ("increase", Direction::Increase)];

fn interpolation(v: &Value, errors: &mut Vec<ParseError>) -> Option<Interpolation> {
    match &v.kind {
        ValueKind::Word(w) => match w.as_str() {
            "step_after" => Some(Interpolation::StepAfter),
            "linear" => Some(Interpolation::Linear),
            "monotone_cubic" => Some(Interpolation::MonotoneCubic),
            "cardinal" => Some(Interpolation::Cardinal { tension: DEFAULT_TENSION }),
            _ => {
                bad(v, "step_after, linear, monotone_cubic or cardinal(tension)", errors);
                None
            }
        },
        ValueKind::Call(name, args) if name == "cardinal" && args.len() == 1 => {
            number(&args[0], errors).map(|tension| Interpolation::Cardinal { tension })
        }
        _ => {
            bad(v, "step_after, linear, monotone_cubic or cardinal(tension)", errors);
            None
        }
    }
}

fn points(v: &Value, errors: &mut Vec<ParseError>) -> Option<Vec<(Decimal, Decimal)>> {
    let ValueKind::List(items) = &v.kind else {
        bad(v, "a list of (x, y) points", errors);
        return None;
    };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        match &item.kind {
            ValueKind::Tuple(xy) if xy.len() == 2 => {
                let x = number(&xy[0], errors)?;
                let y = number(&xy[1], errors)?;
                out.push((x, y));
            }
            _ => {
                bad(item, "an (x, y) point", errors);
                return None;
            }
        }
    }
    Some(out)
}

fn table_function(f: &mut Fields<'_>, errors: &mut Vec<ParseError>) -> Option<TableFunction> {
    let interp = f.required("interpolation", errors).and_then(|v| interpolation(v, errors));
    let extrap = match f.take("extrapolation") {
        Some(v) => choice(
            v,
            &[
                ("clamp", Extrapolation::Clamp),
                ("extend_slope", Extrapolation::ExtendSlope),
                ("reject", Extrapolation::Reject),
            ],
            errors,
        ),
        None => Some(Extrapolation::Clamp),
    };
    let pts = f.required("points", errors).and_then(|v| points(v, errors));
    Some(TableFunction { points: pts?, interpolation: interp?, extrapolation: extrap? })
}

fn opt_text(f: &mut Fields<'_>, key: &str, errors: &mut Vec<ParseError>) -> Option<String> {
    f.take(key).and_then(|v| text(v, errors))
}

fn opt_number(f: &mut Fields<'_>, key: &str, errors: &mut Vec<ParseError>) -> Option<Decimal> {
    f.take(key).and_then(|v| number(v, errors))
}

#[derive(Default)]
struct Lowering {
    model: GoalModel,
    scenarios: Vec<Scenario>,
    errors: Vec<ParseError>,
    seen: BTreeMap<(BlockKind, String), SourceSpan>,
}

pub(crate) fn lower(doc: &Document) -> (GoalModel, Vec<Scenario>, Vec<ParseError>) {
    let mut l = Lowering::default();
    let mut functions: BTreeMap<String, TableFunction> = BTreeMap::new();
    let mut skip = BTreeSet::new();
    for (i, b) in doc.blocks.iter().enumerate() {
        if !l.claim(b) {
            skip.insert(i);
            continue;
        }
        if b.kind == BlockKind::Function {
            let mut f = Fields::new(b, &mut l.errors);
            let tf = table_function(&mut f, &mut l.errors);
            f.finish(&mut l.errors);
            if let (Some(tf), Some(id)) = (tf, &b.id) {
                functions.insert(id.clone(), tf);
            }
        }
    }
    for (i, b) in doc.blocks.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        match b.kind {
            BlockKind::Objective => l.objective(b),
            BlockKind::Requirement => l.requirement(b),
            BlockKind::Softgoal => l.softgoal(b),
            BlockKind::Belief => l.belief(b),
            BlockKind::Link => l.link(b, &functions),
            BlockKind::Utility => l.utility(b),
            BlockKind::Weights => l.weights(b),
            BlockKind::Scenario => l.scenario(b),
            BlockKind::Function => {}
        }
    }
    (l.model, l.scenarios, l.errors)
}

impl Lowering {
    /// Registers a block id; false (plus an error) when already taken.
    fn claim(&mut self, b: &Block) -> bool {
        let Some(id) = &b.id else { return true };
        if self.seen.insert((b.kind, id.clone()), b.span).is_some() {
            self.errors.push(ParseError::new(
                "PARSE_DUPLICATE_ID",
                b.span,
                format!("a unique {} id", b.kind.keyword()),
                format!("'{id}' declared again"),
            ));
            return false;
        }
        true
    }

    fn id_of(&self, b: &Block) -> Option<Id> {
        b.id.clone().map(Id)
    }

    fn objective(&mut self, b: &Block) {
        let Some(id) = self.id_of(b) else { return };
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        let activity = f.required("activity", e).and_then(|v| text(v, e));
        let object = opt_text(&mut f, "object", e).unwrap_or_default();
        let focus = f.required("focus", e).and_then(|v| text(v, e));
        let direction = f.required("direction", e).and_then(|v| choice(v, DIRECTIONS, e));
        let target = f.required("target", e).and_then(|v| number(v, e));
        let threshold = f.required("threshold", e).and_then(|v| number(v, e));
        let as_is = opt_number(&mut f, "as_is", e);
        let unit = f.required("unit", e).and_then(|v| text(v, e));
        let kind = match f.take("kind") {
            Some(v) => choice(v, &[("continuous", ScaleKind::Continuous), ("discrete", ScaleKind::Discrete)], e),
            None => Some(ScaleKind::Continuous),
        };
        let description = opt_text(&mut f, "scale", e).unwrap_or_default();
        let timeframe = opt_text(&mut f, "timeframe", e).unwrap_or_default();
        let scope = opt_text(&mut f, "scope", e).unwrap_or_default();
        let author = opt_text(&mut f, "author", e).unwrap_or_default();
        let worst = opt_number(&mut f, "worst", e);
        let best = opt_number(&mut f, "best", e);
        let parent = f.take("decomposes").and_then(|v| ident(v, e));
        let traces = f.take("traces").map(|v| id_list(v, e)).unwrap_or_default();
        f.finish(e);
        let (Some(activity), Some(focus), Some(direction), Some(target), Some(threshold), Some(unit), Some(kind)) =
            (activity, focus, direction, target, threshold, unit, kind)
        else {
            return;
        };
        if let Some(parent) = parent {
            self.model.decompositions.insert(DecompositionLink { parent, child: id.clone() });
        }
        for to in traces {
            self.model.traces.insert(TraceLink { from: id.clone(), to });
        }
        self.model.add_objective(Objective {
            id,
            activity,
            object,
            focus,
            magnitude: Magnitude { target, threshold, as_is, direction },
            scale: Scale { description, unit, kind },
            timeframe,
            scope,
            author,
            worst,
            best,
        });
    }

    fn requirement(&mut self, b: &Block) {
        let Some(id) = self.id_of(b) else { return };
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        let kind = f.required("kind", e).and_then(|v| {
            choice(
                v,
                &[
                    ("functional", RequirementKind::Functional),
                    ("non_functional", RequirementKind::NonFunctional),
                    ("F", RequirementKind::Functional),
                    ("NF", RequirementKind::NonFunctional),
                ],
                e,
            )
        });
        let headline = f.required("headline", e).and_then(|v| text(v, e));
        let fit_text = f.required("fit", e).and_then(|v| text(v, e));
        let metric = opt_text(&mut f, "metric", e);
        let fit_unit = opt_text(&mut f, "fit_unit", e);
        let fit_target = opt_number(&mut f, "fit_target", e);
        let description = opt_text(&mut f, "description", e).unwrap_or_default();
        let rationale = opt_text(&mut f, "rationale", e).unwrap_or_default();
        let parent = f.take("decomposes").and_then(|v| ident(v, e));
        f.finish(e);
        let (Some(kind), Some(headline), Some(fit_text)) = (kind, headline, fit_text) else {
            return;
        };
        if let Some(parent) = parent {
            self.model.decompositions.insert(DecompositionLink { parent, child: id.clone() });
        }
        self.model.add_requirement(Requirement {
            id,
            kind,
            headline,
            fit: FitCriterion { text: fit_text, metric, unit: fit_unit, target: fit_target },
            description,
            rationale,
        });
    }

    fn softgoal(&mut self, b: &Block) {
        let Some(id) = self.id_of(b) else { return };
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        let statement = f.required("statement", e).and_then(|v| text(v, e));
        let level = match f.take("level") {
            Some(v) => choice(v, &[("goal", SoftGoalLevel::Goal), ("vision", SoftGoalLevel::Vision)], e),
            None => Some(SoftGoalLevel::Goal),
        };
        f.finish(e);
        if let (Some(statement), Some(level)) = (statement, level) {
            self.model.add_softgoal(SoftGoal { id, statement, level });
        }
    }

    fn belief(&mut self, b: &Block) {
        let Some(id) = self.id_of(b) else { return };
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        let statement = f.required("statement", e).and_then(|v| text(v, e));
        let attached_to = f.required("attached_to", e).and_then(|v| ident(v, e));
        f.finish(e);
        if let (Some(statement), Some(attached_to)) = (statement, attached_to) {
            self.model.add_belief(Belief { id, statement, attached_to });
        }
    }

    fn link(&mut self, b: &Block, functions: &BTreeMap<String, TableFunction>) {
        let Some(id) = self.id_of(b) else { return };
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        let source = f.required("from", e).and_then(|v| ident(v, e));
        let target = f.required("to", e).and_then(|v| ident(v, e));
        let effect = f.required("effect", e).and_then(|v| choice(v, DIRECTIONS, e));
        let unit = f.required("unit", e).and_then(|v| text(v, e));
        let amount = f.take("amount");
        let function = f.take("function");
        let quantification = match (amount, function) {
            (Some(v), None) => match &v.kind {
                ValueKind::Num(n) => Some(Quantification::SinglePoint { estimate: Estimate::point(*n) }),
                ValueKind::Estimate(p, h) => {
                    Some(Quantification::SinglePoint { estimate: Estimate { point: *p, halfwidth: Some(*h) } })
                }
                _ => {
                    bad(v, "a number or 'number ± halfwidth'", e);
                    None
                }
            },
            (None, Some(v)) => {
                let name = text(v, e);
                match name.as_ref().and_then(|n| functions.get(n)) {
                    Some(tf) => Some(Quantification::Multi { function: tf.clone() }),
                    None => {
                        if let Some(n) = name {
                            e.push(ParseError::new(
                                "PARSE_UNKNOWN_FUNCTION",
                                v.span,
                                "the name of a function block",
                                format!("'{n}'"),
                            ));
                        }
                        None
                    }
                }
            }
            (Some(v), Some(_)) => {
                e.push(ParseError::new("PARSE_CONFLICTING_FIELDS", v.span, "either 'amount' or 'function'", "both"));
                None
            }
            (None, None) => {
                e.push(ParseError::new(
                    "PARSE_MISSING_FIELD",
                    b.span,
                    "an 'amount' or 'function' field in link block",
                    "neither",
                ));
                None
            }
        };
        let confidence = match f.take("confidence") {
            Some(v) => confidence(v, e),
            None => Some(Confidence::default()),
        };
        let group = match f.take("group") {
            Some(v) => {
                let gid = ident(v, e);
                let mode =
                    f.required("mode", e).and_then(|v| choice(v, &[("AND", GroupMode::And), ("OR", GroupMode::Or)], e));
                match (gid, mode) {
                    (Some(id), Some(mode)) => Some(Some(Group { id, mode })),
                    _ => None,
                }
            }
            None => Some(None),
        };
        let description = opt_text(&mut f, "description", e).unwrap_or_default();
        f.finish(e);
        let (Some(source), Some(target), Some(effect), Some(unit), Some(quantification), Some(confidence), Some(group)) =
            (source, target, effect, unit, quantification, confidence, group)
        else {
            return;
        };
        self.model.add_contribution(ContributionLink {
            id,
            source,
            target,
            quantification,
            effect,
            unit,
            confidence,
            group,
            description,
        });
    }

    fn utility(&mut self, b: &Block) {
        let Some(id) = self.id_of(b) else { return };
        let mut f = Fields::new(b, &mut self.errors);
        let tf = table_function(&mut f, &mut self.errors);
        f.finish(&mut self.errors);
        if let Some(tf) = tf {
            self.model.utilities.insert(id, tf);
        }
    }

    fn weights(&mut self, b: &Block) {
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        for entry in f.all() {
            let Some(w) = number(&entry.value, e) else { continue };
            if self.model.root_weights.insert(Id(entry.key.clone()), w).is_some() {
                e.push(ParseError::new(
                    "PARSE_DUPLICATE_FIELD",
                    entry.span,
                    format!("one weight for '{}'", entry.key),
                    "a second weight",
                ));
            }
        }
        f.finish(e);
    }

    fn scenario(&mut self, b: &Block) {
        let Some(id) = self.id_of(b) else { return };
        let e = &mut self.errors;
        let mut f = Fields::new(b, e);
        let mut s = Scenario::named(id.0);
        if let Some(v) = f.take("levels") {
            for (req, val, _) in pairs(v, e) {
                if let Some(n) = number(val, e) {
                    s.requirement_levels.insert(req, n.to_f64().unwrap_or(f64::NAN));
                }
            }
        }
        if let Some(v) = f.take("select") {
            for (group, val, _) in pairs(v, e) {
                if let Some(link) = ident(val, e) {
                    s.or_selections.insert(group, link);
                }
            }
        }
        if let Some(v) = f.take("confidence") {
            for (link, val, _) in pairs(v, e) {
                if let Some(c) = confidence(val, e) {
                    s.confidence_override.insert(link, c);
                }
            }
        }
        if let Some(v) = f.take("pin") {
            for (obj, val, _) in pairs(v, e) {
                if let Some(n) = number(val, e) {
                    s.pinned.insert(obj, n.to_f64().unwrap_or(f64::NAN));
                }
            }
        }
        if let Some(on) = f.take("confidence_adjust").and_then(|v| switch(v, e)) {
            s.options.confidence_adjust = on;
        }
        if let Some(on) = f.take("proration").and_then(|v| switch(v, e)) {
            s.options.single_point_proration = on;
        }
        if let Some(p) =
            f.take("or").and_then(|v| choice(v, &[("require", OrPolicy::Require), ("best", OrPolicy::Best)], e))
        {
            s.options.or_policy = p;
        }
        f.finish(e);
        self.scenarios.push(s);
    }
}
