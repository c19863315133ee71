//! Domain types of the quantified goal graph.
//!
//! A [`GoalModel`] holds requirements (GRL tasks), objectives (hard goals),
//! soft goals, beliefs, and the three link kinds between them. Only
//! contribution links carry quantities; decomposition and trace links are
//! structural.

mod label;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::functions::TableFunction;

pub use label::format_label;
pub use validate::{roots, validate, Finding, Severity, ValidationReport};

/// Caller-supplied identifier of a node or link.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Id(pub String);

impl Id {
    pub fn new(s: impl Into<String>) -> Self {
        Id(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id(s.to_string())
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id(s)
    }
}

impl std::borrow::Borrow<str> for Id {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Reduction,
    Increase,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Reduction => "reduction",
            Direction::Increase => "increase",
        }
    }

    /// Capitalised noun used in contribution descriptions ("Reduction").
    pub fn noun(self) -> &'static str {
        match self {
            Direction::Reduction => "Reduction",
            Direction::Increase => "Increase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "reduction" => Some(Direction::Reduction),
            "increase" => Some(Direction::Increase),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    #[default]
    Continuous,
    Discrete,
}

impl ScaleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleKind::Continuous => "continuous",
            ScaleKind::Discrete => "discrete",
        }
    }
}

/// What is measured and in which unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub description: String,
    pub unit: String,
    pub kind: ScaleKind,
}

impl Scale {
    pub fn is_percent(&self) -> bool {
        self.unit == "%"
    }
}

/// Target, threshold and baseline qualifying an objective's demanded change.
///
/// `target` and `threshold` are deltas in the objective's direction: a
/// reduction from 6 to 3 months has target 3. `as_is` is the absolute level
/// of the focus before the change.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Magnitude {
    pub target: Decimal,
    pub threshold: Decimal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_is: Option<Decimal>,
    pub direction: Direction,
}

/// A quantified hard goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub id: Id,
    pub activity: String,
    pub object: String,
    pub focus: String,
    pub magnitude: Magnitude,
    pub scale: Scale,
    #[serde(default)]
    pub timeframe: String,
    #[serde(default)]
    pub scope: String,
    #[serde(default)]
    pub author: String,
    /// Declared worst/best achievable deltas, used to check that table
    /// functions fed by this objective cover its plausible range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best: Option<Decimal>,
}

impl Objective {
    pub fn target(&self) -> f64 {
        to_f64(self.magnitude.target)
    }

    pub fn threshold(&self) -> f64 {
        to_f64(self.magnitude.threshold)
    }

    pub fn declared_range(&self) -> Option<(f64, f64)> {
        match (self.worst, self.best) {
            (Some(w), Some(b)) => {
                let (w, b) = (to_f64(w), to_f64(b));
                Some((w.min(b), w.max(b)))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequirementKind {
    Functional,
    NonFunctional,
}

impl RequirementKind {
    pub fn prefix(self) -> &'static str {
        match self {
            RequirementKind::Functional => "F",
            RequirementKind::NonFunctional => "NF",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RequirementKind::Functional => "functional",
            RequirementKind::NonFunctional => "non_functional",
        }
    }
}

/// The testable metric attached to a requirement. `text` is the short-hand
/// shown in labels; the structured fields are optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitCriterion {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Decimal>,
}

/// A software requirement, drawn as a GRL task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: Id,
    pub kind: RequirementKind,
    pub headline: String,
    pub fit: FitCriterion,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub rationale: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SoftGoalLevel {
    Goal,
    Vision,
}

impl SoftGoalLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            SoftGoalLevel::Goal => "goal",
            SoftGoalLevel::Vision => "vision",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftGoal {
    pub id: Id,
    pub statement: String,
    pub level: SoftGoalLevel,
}

/// An assumption attached to a node or a link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Belief {
    pub id: Id,
    pub statement: String,
    pub attached_to: Id,
}

/// Named confidence levels: poor, average, great and perfect credibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidencePreset {
    Poor,
    Average,
    Great,
    Perfect,
}

impl ConfidencePreset {
    pub fn value(self) -> Decimal {
        match self {
            ConfidencePreset::Poor => Decimal::new(25, 2),
            ConfidencePreset::Average => Decimal::new(5, 1),
            ConfidencePreset::Great => Decimal::new(75, 2),
            ConfidencePreset::Perfect => Decimal::ONE,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConfidencePreset::Poor => "poor",
            ConfidencePreset::Average => "average",
            ConfidencePreset::Great => "great",
            ConfidencePreset::Perfect => "perfect",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "poor" => Some(ConfidencePreset::Poor),
            "average" => Some(ConfidencePreset::Average),
            "great" => Some(ConfidencePreset::Great),
            "perfect" => Some(ConfidencePreset::Perfect),
            _ => None,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ConfidencePreset::Poor => "no supporting evidence or calculations, high doubt about capability",
            ConfidencePreset::Average => "no evidence but reliable calculations, some doubt about capability",
            ConfidencePreset::Great => "reliable secondary sources of evidence, small doubt about capability",
            ConfidencePreset::Perfect => "multiple primary sources of evidence, no doubt about capability",
        }
    }
}

/// Belief in `[0, 1]` that a stated prediction is correct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confidence {
    pub value: Decimal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<ConfidencePreset>,
}

impl Confidence {
    pub fn preset(p: ConfidencePreset) -> Self {
        Confidence { value: p.value(), label: Some(p) }
    }

    pub fn value(v: Decimal) -> Self {
        Confidence { value: v, label: None }
    }

    pub fn as_f64(&self) -> f64 {
        to_f64(self.value)
    }
}

impl Default for Confidence {
    fn default() -> Self {
        Confidence::preset(ConfidencePreset::Perfect)
    }
}

/// A point estimate, optionally widened to `point ± halfwidth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    pub point: Decimal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfwidth: Option<Decimal>,
}

impl Estimate {
    pub fn point(p: Decimal) -> Self {
        Estimate { point: p, halfwidth: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Quantification {
    /// Contribution assuming the source reaches its target.
    SinglePoint { estimate: Estimate },
    /// Contribution across all source satisfaction levels.
    Multi { function: TableFunction },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupMode {
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
}

impl GroupMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupMode::And => "AND",
            GroupMode::Or => "OR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub id: Id,
    pub mode: GroupMode,
}

/// Means-end edge predicting how far the source moves the target's focus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributionLink {
    pub id: Id,
    pub source: Id,
    pub target: Id,
    pub quantification: Quantification,
    pub effect: Direction,
    pub unit: String,
    pub confidence: Confidence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

impl ContributionLink {
    /// `[80%]`, `[3 months]`, `[2±1 FTE]`, or `[f: step_after]`.
    pub fn amount_text(&self) -> String {
        match &self.quantification {
            Quantification::SinglePoint { estimate } => {
                let mut s = estimate.point.normalize().to_string();
                if let Some(h) = estimate.halfwidth {
                    s.push('±');
                    s.push_str(&h.normalize().to_string());
                }
                format!("[{}]", with_unit(&s, &self.unit))
            }
            Quantification::Multi { function } => {
                format!("[f: {} {}]", function.interpolation.name(), self.unit)
            }
        }
    }
}

/// Appends a unit token to a number: `80%` but `3 months`.
pub fn with_unit(number: &str, unit: &str) -> String {
    if unit == "%" {
        format!("{number}%")
    } else {
        format!("{number} {unit}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecompositionLink {
    pub parent: Id,
    pub child: Id,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceLink {
    pub from: Id,
    pub to: Id,
}

/// Borrowed view of any node.
#[derive(Clone, Copy, Debug)]
pub enum NodeRef<'a> {
    Objective(&'a Objective),
    Requirement(&'a Requirement),
    SoftGoal(&'a SoftGoal),
    Belief(&'a Belief),
}

impl NodeRef<'_> {
    pub fn id(&self) -> &Id {
        match self {
            NodeRef::Objective(o) => &o.id,
            NodeRef::Requirement(r) => &r.id,
            NodeRef::SoftGoal(s) => &s.id,
            NodeRef::Belief(b) => &b.id,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NodeRef::Objective(_) => "objective",
            NodeRef::Requirement(_) => "requirement",
            NodeRef::SoftGoal(_) => "softgoal",
            NodeRef::Belief(_) => "belief",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalModel {
    #[serde(default)]
    pub objectives: BTreeMap<Id, Objective>,
    #[serde(default)]
    pub requirements: BTreeMap<Id, Requirement>,
    #[serde(default)]
    pub softgoals: BTreeMap<Id, SoftGoal>,
    #[serde(default)]
    pub beliefs: BTreeMap<Id, Belief>,
    #[serde(default)]
    pub contributions: BTreeMap<Id, ContributionLink>,
    #[serde(default)]
    pub decompositions: BTreeSet<DecompositionLink>,
    #[serde(default)]
    pub traces: BTreeSet<TraceLink>,
    #[serde(default)]
    pub root_weights: BTreeMap<Id, Decimal>,
    #[serde(default)]
    pub utilities: BTreeMap<Id, TableFunction>,
}

impl GoalModel {
    pub fn is_empty(&self) -> bool {
        *self == GoalModel::default()
    }

    pub fn add_objective(&mut self, o: Objective) {
        self.objectives.insert(o.id.clone(), o);
    }

    pub fn add_requirement(&mut self, r: Requirement) {
        self.requirements.insert(r.id.clone(), r);
    }

    pub fn add_softgoal(&mut self, s: SoftGoal) {
        self.softgoals.insert(s.id.clone(), s);
    }

    pub fn add_belief(&mut self, b: Belief) {
        self.beliefs.insert(b.id.clone(), b);
    }

    pub fn add_contribution(&mut self, l: ContributionLink) {
        self.contributions.insert(l.id.clone(), l);
    }

    pub fn node(&self, id: &str) -> Option<NodeRef<'_>> {
        if let Some(o) = self.objectives.get(id) {
            return Some(NodeRef::Objective(o));
        }
        if let Some(r) = self.requirements.get(id) {
            return Some(NodeRef::Requirement(r));
        }
        if let Some(s) = self.softgoals.get(id) {
            return Some(NodeRef::SoftGoal(s));
        }
        self.beliefs.get(id).map(NodeRef::Belief)
    }

    /// Contribution links leaving `id`, in link-id order.
    pub fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a ContributionLink> + 'a {
        self.contributions.values().filter(move |l| l.source.as_str() == id)
    }

    /// Contribution links entering `id`, in link-id order.
    pub fn incoming<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a ContributionLink> + 'a {
        self.contributions.values().filter(move |l| l.target.as_str() == id)
    }

    /// Target value a source must reach for a single-point link to fire:
    /// full satisfaction (1) for requirements, the magnitude target for
    /// objectives.
    pub fn source_target(&self, id: &str) -> Option<f64> {
        if self.requirements.contains_key(id) {
            Some(1.0)
        } else {
            self.objectives.get(id).map(Objective::target)
        }
    }

    /// Root weights normalised to sum to one; uniform when none are given.
    pub fn normalized_weights(&self) -> BTreeMap<Id, f64> {
        let roots = roots(self);
        let given: Vec<(Id, f64)> =
            roots.iter().filter_map(|r| self.root_weights.get(r.as_str()).map(|w| (r.clone(), to_f64(*w)))).collect();
        let total: f64 = given.iter().map(|(_, w)| w).sum();
        if given.is_empty() || total <= 0.0 {
            let n = roots.len() as f64;
            return roots.into_iter().map(|r| (r, 1.0 / n)).collect();
        }
        let mut out: BTreeMap<Id, f64> = roots.into_iter().map(|r| (r, 0.0)).collect();
        for (id, w) in given {
            out.insert(id, w / total);
        }
        out
    }
}

pub(crate) fn to_f64(d: Decimal) -> f64 {
    use rust_decimal::prelude::ToPrimitive;
    d.to_f64().unwrap_or(f64::NAN)
}

/// Orders ids so that embedded numbers compare by value: `obj4 < obj10`.
pub fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x, y) {
            ((true, p), (true, q)) => {
                let (p, q) = (p.trim_start_matches('0'), q.trim_start_matches('0'));
                p.len().cmp(&q.len()).then_with(|| p.cmp(q))
            }
            ((_, p), (_, q)) => p.cmp(q),
        };
        if ord.is_ne() {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}
