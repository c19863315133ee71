use std::collections::{BTreeMap, BTreeSet};

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{Direction, GoalModel, Id, NodeRef, Quantification, RequirementKind, ScaleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: String,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    fn error(&mut self, code: &str, location: impl ToString, message: impl Into<String>) {
        self.push(Severity::Error, code, location, message);
    }

    fn warn(&mut self, code: &str, location: impl ToString, message: impl Into<String>) {
        self.push(Severity::Warning, code, location, message);
    }

    fn push(&mut self, severity: Severity, code: &str, location: impl ToString, message: impl Into<String>) {
        self.findings.push(Finding {
            severity,
            code: code.to_string(),
            location: location.to_string(),
            message: message.into(),
        });
    }
}

/// Objectives with no outgoing contribution link, in id order.
pub fn roots(model: &GoalModel) -> Vec<Id> {
    let sources: BTreeSet<&str> = model.contributions.values().map(|l| l.source.as_str()).collect();
    model.objectives.keys().filter(|id| !sources.contains(id.as_str())).cloned().collect()
}

const REDUCTION_VERBS: &[&str] =
    &["Reduced", "Decreased", "Lowered", "Minimised", "Minimized", "Shortened", "Cut", "Eliminated"];
const INCREASE_VERBS: &[&str] =
    &["Increased", "Improved", "Raised", "Maximised", "Maximized", "Grown", "Extended", "Enhanced", "Expanded"];

/// Checks every well-formedness rule of a goal model.
///
/// Never fails; each violated rule becomes one finding with its own code.
pub fn validate(model: &GoalModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_ids(model, &mut report);
    check_objectives(model, &mut report);
    check_requirements(model, &mut report);
    check_beliefs(model, &mut report);
    check_contributions(model, &mut report);
    check_groups(model, &mut report);
    check_decompositions(model, &mut report);
    check_traces(model, &mut report);
    check_cycles(model, &mut report);
    check_roots(model, &mut report);
    report
}

fn check_ids(model: &GoalModel, report: &mut ValidationReport) {
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    let all = model
        .objectives
        .iter()
        .map(|(k, v)| (k, &v.id, "objective"))
        .chain(model.requirements.iter().map(|(k, v)| (k, &v.id, "requirement")))
        .chain(model.softgoals.iter().map(|(k, v)| (k, &v.id, "softgoal")))
        .chain(model.beliefs.iter().map(|(k, v)| (k, &v.id, "belief")))
        .chain(model.contributions.iter().map(|(k, v)| (k, &v.id, "link")));
    for (key, id, kind) in all {
        if key != id {
            report.error("ID_MISMATCH", key, format!("{kind} stored under '{key}' declares id '{id}'"));
        }
        if id.as_str().trim().is_empty() {
            report.error("EMPTY_ID", kind, format!("{kind} with an empty id"));
        }
        if let Some(prev) = seen.insert(key.as_str(), kind) {
            report.error("DUPLICATE_ID", key, format!("id '{key}' used by both a {prev} and a {kind}"));
        }
    }
}

fn is_integer(d: Decimal) -> bool {
    d.fract().is_zero()
}

fn check_objectives(model: &GoalModel, report: &mut ValidationReport) {
    for (id, o) in &model.objectives {
        if o.scale.unit.trim().is_empty() {
            report.error("EMPTY_UNIT", id, "scale unit must be a non-empty token");
        }
        if o.activity.trim().is_empty() || (o.object.trim().is_empty() && o.focus.trim().is_empty()) {
            report.error("EMPTY_LABEL_FIELD", id, "objective needs an activity and an object or focus");
        }
        let m = &o.magnitude;
        if m.threshold > m.target {
            report.error(
                "THRESHOLD_EXCEEDS_TARGET",
                id,
                format!("threshold {} demands more than target {}", m.threshold, m.target),
            );
        }
        if o.scale.kind == ScaleKind::Discrete {
            let values = [Some(m.target), Some(m.threshold), m.as_is];
            if values.iter().flatten().any(|v| !is_integer(*v)) {
                report.error("DISCRETE_NON_INTEGER", id, "discrete scale with a non-integer magnitude value");
            }
        }
        let percent_in = model.incoming(id.as_str()).any(|l| l.unit == "%");
        if (o.scale.is_percent() || percent_in) && m.as_is.is_none() {
            report.error(
                "PERCENT_NEEDS_BASELINE",
                id,
                "percentages are used on this objective but no as-is value is recorded",
            );
        }
        let verb = o.activity.trim();
        let implied = if REDUCTION_VERBS.contains(&verb) {
            Some(Direction::Reduction)
        } else if INCREASE_VERBS.contains(&verb) {
            Some(Direction::Increase)
        } else {
            None
        };
        if implied.is_some_and(|d| d != m.direction) {
            report.error(
                "ACTIVITY_DIRECTION",
                id,
                format!("activity '{verb}' contradicts direction {}", m.direction.as_str()),
            );
        }
    }
}

fn check_requirements(model: &GoalModel, report: &mut ValidationReport) {
    for (id, r) in &model.requirements {
        if r.headline.trim().is_empty() {
            report.error("EMPTY_HEADLINE", id, "requirement headline is empty");
        }
        if r.fit.text.trim().is_empty() {
            report.error("EMPTY_FIT_CRITERION", id, "requirement has no fit criterion");
        }
    }
}

fn check_beliefs(model: &GoalModel, report: &mut ValidationReport) {
    for (id, b) in &model.beliefs {
        let target = b.attached_to.as_str();
        if model.node(target).is_none() && !model.contributions.contains_key(target) {
            report.error("UNRESOLVED_ATTACHMENT", id, format!("belief attached to unknown element '{target}'"));
        }
    }
}

fn check_contributions(model: &GoalModel, report: &mut ValidationReport) {
    let mut source_units: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (id, l) in &model.contributions {
        match model.node(l.source.as_str()) {
            None => report.error("UNKNOWN_REFERENCE", id, format!("unknown source '{}'", l.source)),
            Some(NodeRef::Objective(_)) | Some(NodeRef::Requirement(_)) => {}
            Some(other) => report.error(
                "INVALID_SOURCE",
                id,
                format!("a {} cannot be the source of a contribution", other.kind_name()),
            ),
        }
        match model.node(l.target.as_str()) {
            None => report.error("UNKNOWN_REFERENCE", id, format!("unknown target '{}'", l.target)),
            Some(NodeRef::SoftGoal(_)) => {
                report.error("SOFTGOAL_TARGET", id, "soft goals only take trace links, not quantified contributions")
            }
            Some(NodeRef::Objective(o)) => {
                if o.scale.unit != l.unit {
                    report.error(
                        "UNIT_MISMATCH",
                        id,
                        format!("link unit '{}' differs from target scale unit '{}'", l.unit, o.scale.unit),
                    );
                }
            }
            Some(other) => report.error(
                "INVALID_TARGET",
                id,
                format!("a {} cannot be the target of a contribution", other.kind_name()),
            ),
        }
        if l.source == l.target {
            report.error("SELF_LINK", id, "source and target are the same node");
        }

        let c = &l.confidence;
        if c.value < Decimal::ZERO || c.value > Decimal::ONE {
            report.error("CONFIDENCE_RANGE", id, format!("confidence {} outside [0, 1]", c.value));
        }
        if let Some(p) = c.label {
            if p.value() != c.value {
                report.error(
                    "CONFIDENCE_LABEL_MISMATCH",
                    id,
                    format!("preset '{}' is {} but value is {}", p.as_str(), p.value(), c.value),
                );
            }
        }

        match &l.quantification {
            Quantification::SinglePoint { estimate } => {
                if let Some(h) = estimate.halfwidth {
                    if h < Decimal::ZERO {
                        report.error("NEGATIVE_HALFWIDTH", id, "interval halfwidth must be non-negative");
                    } else if let Some((worst, best)) =
                        model.objectives.get(l.target.as_str()).and_then(|o| o.declared_range())
                    {
                        let lo = super::to_f64(estimate.point - h);
                        let hi = super::to_f64(estimate.point + h);
                        if lo < worst || hi > best {
                            report.error(
                                "INTERVAL_OUT_OF_BOUNDS",
                                id,
                                format!("estimate interval [{lo}, {hi}] leaves declared range [{worst}, {best}]"),
                            );
                        }
                    }
                }
                let partial_source = match model.node(l.source.as_str()) {
                    Some(NodeRef::Objective(_)) => true,
                    Some(NodeRef::Requirement(r)) => r.kind == RequirementKind::NonFunctional,
                    _ => false,
                };
                if partial_source {
                    report.warn(
                        "SINGLE_POINT_LINK",
                        id,
                        "single-point link from a partially satisfiable source; sweeps through it are all-or-nothing",
                    );
                }
            }
            Quantification::Multi { function } => {
                for issue in function.issues() {
                    report.error(issue.code(), id, issue.to_string());
                }
            }
        }
        source_units.entry(l.source.as_str()).or_default().insert(l.unit.as_str());
    }
    for (source, units) in source_units {
        if units.len() > 1 && model.requirements.contains_key(source) {
            let list: Vec<&str> = units.into_iter().collect();
            report.warn(
                "MULTI_UNIT_SOURCE",
                source,
                format!("requirement contributes in several units ({}); review", list.join(", ")),
            );
        }
    }
}

fn check_groups(model: &GoalModel, report: &mut ValidationReport) {
    let mut groups: BTreeMap<&Id, Vec<&super::ContributionLink>> = BTreeMap::new();
    for l in model.contributions.values() {
        if let Some(g) = &l.group {
            groups.entry(&g.id).or_default().push(l);
        }
    }
    for (gid, links) in groups {
        let first = links[0];
        let first_group = first.group.as_ref().expect("grouped");
        for l in &links[1..] {
            let g = l.group.as_ref().expect("grouped");
            if g.mode != first_group.mode || l.target != first.target {
                report.error(
                    "GROUP_INCONSISTENT",
                    gid,
                    format!("links '{}' and '{}' share group '{gid}' but differ in mode or target", first.id, l.id),
                );
            }
        }
    }
}

fn check_decompositions(model: &GoalModel, report: &mut ValidationReport) {
    let mut parents: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for d in &model.decompositions {
        let loc = format!("{}>{}", d.parent, d.child);
        for end in [&d.parent, &d.child] {
            match model.node(end.as_str()) {
                None => report.error("UNKNOWN_REFERENCE", &loc, format!("unknown node '{end}' in decomposition")),
                Some(NodeRef::Objective(_)) | Some(NodeRef::Requirement(_)) => {}
                Some(other) => report.error(
                    "INVALID_DECOMPOSITION",
                    &loc,
                    format!("a {} cannot take part in a decomposition", other.kind_name()),
                ),
            }
        }
        parents.entry(&d.child).or_default().push(&d.parent);
    }
    for (child, ps) in &parents {
        if ps.len() > 1 {
            report.error("DECOMPOSITION_NOT_FOREST", child, format!("'{child}' decomposes more than one parent"));
        }
    }
    // Walking up from every child must terminate.
    for start in parents.keys() {
        let mut seen = BTreeSet::new();
        let mut cur: &Id = start;
        while let Some(ps) = parents.get(cur) {
            if !seen.insert(cur) {
                report.error("DECOMPOSITION_NOT_FOREST", start, "decomposition links form a cycle");
                break;
            }
            cur = ps[0];
        }
    }
}

fn check_traces(model: &GoalModel, report: &mut ValidationReport) {
    for t in &model.traces {
        let loc = format!("{}~{}", t.from, t.to);
        let from = model.node(t.from.as_str());
        let to = model.node(t.to.as_str());
        if from.is_none() || to.is_none() {
            report.error("UNKNOWN_REFERENCE", &loc, "trace link references an unknown node");
            continue;
        }
        if !matches!(from, Some(NodeRef::Objective(_))) || !matches!(to, Some(NodeRef::SoftGoal(_))) {
            report.error("INVALID_TRACE", &loc, "trace links run from an objective to a soft goal");
        }
    }
}

fn check_cycles(model: &GoalModel, report: &mut ValidationReport) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    let nodes: BTreeSet<&str> =
        model.contributions.values().flat_map(|l| [l.source.as_str(), l.target.as_str()]).collect();
    for start in nodes {
        if marks.contains_key(start) {
            continue;
        }
        // Iterative DFS; the stack holds (node, remaining outgoing links).
        let mut stack: Vec<(&str, Vec<&super::ContributionLink>)> = Vec::new();
        marks.insert(start, Mark::Open);
        stack.push((start, model.outgoing(start).collect::<Vec<_>>().into_iter().rev().collect()));
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            match top.1.pop() {
                Some(link) => {
                    let next = link.target.as_str();
                    match marks.get(next) {
                        Some(Mark::Open) => report.error(
                            "CYCLE",
                            &link.id,
                            format!("link {}→{} closes a contribution cycle", link.source, link.target),
                        ),
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(next, Mark::Open);
                            let out: Vec<_> = model.outgoing(next).collect::<Vec<_>>().into_iter().rev().collect();
                            stack.push((next, out));
                        }
                    }
                }
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
}

fn check_roots(model: &GoalModel, report: &mut ValidationReport) {
    let roots = roots(model);
    let root_set: BTreeSet<&str> = roots.iter().map(Id::as_str).collect();
    if !model.objectives.is_empty() && roots.is_empty() {
        report.warn("NO_ROOTS", "model", "every objective contributes to another; no root objectives");
    }
    for (id, w) in &model.root_weights {
        if !root_set.contains(id.as_str()) {
            report.error("WEIGHT_NOT_ROOT", id, "weights attach only to root objectives");
        }
        if *w < Decimal::ZERO {
            report.error("NEGATIVE_WEIGHT", id, "root weight is negative");
        }
    }
    let weighted = model.root_weights.len();
    if weighted > 1 {
        let sum: Decimal = model.root_weights.values().copied().sum();
        if (super::to_f64(sum) - 1.0).abs() > 1e-9 {
            report.error("WEIGHTS_SUM", "weights", format!("root weights sum to {sum}, not 1"));
        }
    }
    if roots.len() > 1 && weighted == 0 {
        report.warn("UNWEIGHTED_ROOTS", "weights", "several root objectives and no weights; using uniform weights");
    }
    for (id, f) in &model.utilities {
        if !root_set.contains(id.as_str()) {
            report.error("UTILITY_NOT_ROOT", id, "utility functions attach only to root objectives");
        }
        for issue in f.issues() {
            report.error(issue.code(), id, issue.to_string());
        }
        if f.points.iter().any(|&(_, y)| y < Decimal::ZERO || y > Decimal::ONE) {
            report.error("UTILITY_RANGE", id, "utility values must lie in [0, 1]");
        }
    }
}
