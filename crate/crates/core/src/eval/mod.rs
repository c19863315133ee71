//! Propagation of satisfaction through the goal graph under a scenario.
//!
//! Nodes are processed in topological order of contribution links. Each
//! link's raw contribution is computed from the confidence-free state of its
//! source; confidence adjustment then scales that link's contribution alone.
//! Confidence is therefore never compounded along a chain inside
//! [`evaluate`]; [`summarize_chain`] reports the compounded product
//! separately.

mod audit;
mod chain;
mod interval;
mod scenario;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functions::{Extrapolation, FunctionError, Interpolation, TableFunction};
use crate::model::{self, ContributionLink, Finding, GoalModel, GroupMode, Id, Objective, Quantification};

pub use audit::audit;
pub use chain::{summarize_chain, ChainSummary, HopEffect, CHAIN_CONFIDENCE_NOTE};
pub use interval::evaluate_interval;
pub use scenario::{OrPolicy, Scenario, ScenarioOptions};

/// Wording attached to every confidence-adjusted output.
pub const CONFIDENCE_CAVEAT: &str =
    "Confidence-adjusted values are an indication of the effects of confidence, not expected values.";

/// Absolute tolerance used when grading achieved values against magnitudes.
pub const GRADE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    ThresholdMet,
    Unsatisfied,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Satisfied => "satisfied",
            Status::ThresholdMet => "threshold_met",
            Status::Unsatisfied => "unsatisfied",
            Status::Indeterminate => "indeterminate",
        }
    }
}

/// One link's effect on its target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContributionOutcome {
    pub link: Id,
    /// Signed contribution before confidence adjustment.
    pub raw: f64,
    /// Confidence value in force for this link (after overrides).
    pub confidence: f64,
    /// The amount added to the target: `raw × confidence` when adjustment is
    /// on, `raw` otherwise.
    pub adjusted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeOutcome {
    /// Requirements: satisfaction level. Objectives: delta in the
    /// objective's direction, on its own scale.
    pub achieved: f64,
    pub status: Status,
    pub contributions: Vec<ContributionOutcome>,
    /// For percent objectives with an as-is value: the achieved change in the
    /// focus's own units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AuditFlag {
    pub code: String,
    pub location: String,
    pub message: String,
}

impl AuditFlag {
    pub(crate) fn new(code: &str, location: impl ToString, message: impl Into<String>) -> Self {
        AuditFlag { code: code.to_string(), location: location.to_string(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalOutcome {
    pub lo: f64,
    pub hi: f64,
    /// Status of the low end.
    pub pessimistic: Status,
    /// Status of the high end.
    pub optimistic: Status,
    /// Set when a bound came from grid sampling.
    pub approximate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub scenario: String,
    pub confidence_adjusted: bool,
    pub nodes: BTreeMap<Id, NodeOutcome>,
    pub root_utilities: BTreeMap<Id, f64>,
    /// Weighted utility over roots; absent when a root is indeterminate.
    pub total_utility: Option<f64>,
    pub audit_flags: Vec<AuditFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_results: Option<BTreeMap<Id, IntervalOutcome>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EvaluationResult {
    pub fn node(&self, id: &str) -> Option<&NodeOutcome> {
        self.nodes.get(id)
    }

    pub fn achieved(&self, id: &str) -> Option<f64> {
        self.nodes.get(id).map(|n| n.achieved)
    }

    pub fn status(&self, id: &str) -> Option<Status> {
        self.nodes.get(id).map(|n| n.status)
    }

    pub fn contribution(&self, link: &str) -> Option<&ContributionOutcome> {
        self.nodes.values().flat_map(|n| &n.contributions).find(|c| c.link.as_str() == link)
    }

    pub fn has_flag(&self, code: &str) -> bool {
        self.audit_flags.iter().any(|f| f.code == code)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("model has {} validation error(s); first: {}", .0.len(), .0.first().map(|f| f.code.as_str()).unwrap_or(""))]
    InvalidModel(Vec<Finding>),
    #[error("INVALID_SCENARIO: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error("link {link}: {source}")]
    Domain { link: Id, source: FunctionError },
}

impl EvalError {
    pub fn code(&self) -> &str {
        match self {
            EvalError::InvalidModel(f) => f.first().map(|f| f.code.as_str()).unwrap_or("INVALID_MODEL"),
            EvalError::InvalidScenario(_) => "INVALID_SCENARIO",
            EvalError::Domain { .. } => "DOMAIN_VIOLATION",
        }
    }
}

/// Grades an achieved delta against an objective's magnitude.
pub fn grade(objective: &Objective, achieved: f64) -> Status {
    if achieved >= objective.target() - GRADE_TOLERANCE {
        Status::Satisfied
    } else if achieved >= objective.threshold() - GRADE_TOLERANCE {
        Status::ThresholdMet
    } else {
        Status::Unsatisfied
    }
}

fn grade_requirement(level: f64) -> Status {
    if level >= 1.0 - GRADE_TOLERANCE {
        Status::Satisfied
    } else {
        Status::Unsatisfied
    }
}

/// Requirements and objectives in topological order of contribution links,
/// ties broken by id. Assumes an acyclic model.
pub fn topological_order(model: &GoalModel) -> Vec<Id> {
    let mut indegree: BTreeMap<&str, usize> =
        model.requirements.keys().chain(model.objectives.keys()).map(|id| (id.as_str(), 0)).collect();
    for l in model.contributions.values() {
        if let Some(d) = indegree.get_mut(l.target.as_str()) {
            *d += 1;
        }
    }
    let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(id, _)| *id).collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(id) = ready.pop_first() {
        order.push(Id::from(id));
        for l in model.outgoing(id) {
            if let Some(d) = indegree.get_mut(l.target.as_str()) {
                *d -= 1;
                if *d == 0 {
                    ready.insert(l.target.as_str());
                }
            }
        }
    }
    order
}

/// Confidence-free state of a node, used to compute outgoing contributions.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SourceState {
    pub raw: f64,
    pub raw_status: Status,
    pub indeterminate: bool,
}

pub(crate) fn sign(model: &GoalModel, link: &ContributionLink) -> f64 {
    match model.objectives.get(link.target.as_str()) {
        Some(t) if t.magnitude.direction != link.effect => -1.0,
        _ => 1.0,
    }
}

pub(crate) fn link_confidence(link: &ContributionLink, scenario: &Scenario) -> f64 {
    scenario.confidence_override.get(link.id.as_str()).unwrap_or(&link.confidence).as_f64()
}

/// The two-point linear function a single-point link follows under
/// proration.
pub(crate) fn proration_function(source_target: f64, point: f64) -> Option<TableFunction> {
    if source_target.is_nan() || source_target <= 0.0 {
        return None;
    }
    TableFunction::from_f64(&[(0.0, 0.0), (source_target, point)], Interpolation::Linear, Extrapolation::Clamp).ok()
}

/// Raw (unadjusted, signed) contribution of a link.
fn raw_contribution(
    model: &GoalModel,
    link: &ContributionLink,
    source: SourceState,
    scenario: &Scenario,
    flags: &mut Vec<AuditFlag>,
) -> Result<f64, EvalError> {
    let s = sign(model, link);
    match &link.quantification {
        Quantification::SinglePoint { estimate } => {
            let point = model::to_f64(estimate.point);
            if source.raw_status == Status::Satisfied {
                return Ok(s * point);
            }
            if scenario.options.single_point_proration {
                let target = model.source_target(link.source.as_str()).unwrap_or(1.0);
                if let Some(f) = proration_function(target, point) {
                    return Ok(s * f.evaluate(source.raw).unwrap_or(0.0));
                }
            }
            if source.raw.abs() > GRADE_TOLERANCE {
                flags.push(AuditFlag::new(
                    "PARTIAL_UNMODELED",
                    &link.id,
                    format!("source '{}' is partially satisfied; single-point link contributes 0", link.source),
                ));
            }
            Ok(0.0)
        }
        Quantification::Multi { function } => {
            let sample =
                function.sample(source.raw).map_err(|e| EvalError::Domain { link: link.id.clone(), source: e })?;
            if sample.out_of_domain {
                let (lo, hi) = function.domain();
                flags.push(AuditFlag::new(
                    "STALE_DOMAIN",
                    &link.id,
                    format!("input {} outside function domain [{lo}, {hi}]; update the table function", source.raw),
                ));
            }
            Ok(s * sample.y)
        }
    }
}

/// Active links into `target`: ungrouped and AND links, plus the chosen link
/// of each OR group. Unresolved OR groups are returned separately.
pub(crate) fn active_links<'m>(
    model: &'m GoalModel,
    target: &'m str,
    scenario: &Scenario,
) -> (Vec<&'m ContributionLink>, BTreeMap<&'m Id, Vec<&'m ContributionLink>>) {
    let mut active = Vec::new();
    let mut open_groups: BTreeMap<&Id, Vec<&ContributionLink>> = BTreeMap::new();
    for l in model.incoming(target) {
        match &l.group {
            Some(g) if g.mode == GroupMode::Or => match scenario.or_selections.get(g.id.as_str()) {
                Some(sel) if sel == &l.id => active.push(l),
                Some(_) => {}
                None => open_groups.entry(&g.id).or_default().push(l),
            },
            _ => active.push(l),
        }
    }
    (active, open_groups)
}

/// Evaluates a model under a scenario.
///
/// Validates both first; use [`evaluate_trusted`] when the model is already
/// known to be valid.
pub fn evaluate(model: &GoalModel, scenario: &Scenario) -> Result<EvaluationResult, EvalError> {
    let report = model::validate(model);
    if report.has_errors() {
        return Err(EvalError::InvalidModel(report.errors().cloned().collect()));
    }
    evaluate_trusted(model, scenario)
}

/// Evaluates a model that has already passed validation.
pub fn evaluate_trusted(model: &GoalModel, scenario: &Scenario) -> Result<EvaluationResult, EvalError> {
    let problems = scenario.check(model);
    if !problems.is_empty() {
        return Err(EvalError::InvalidScenario(problems));
    }
    let adjust = scenario.options.confidence_adjust;
    let mut flags: Vec<AuditFlag> = audit(model);
    let mut states: BTreeMap<Id, SourceState> = BTreeMap::new();
    let mut nodes: BTreeMap<Id, NodeOutcome> = BTreeMap::new();

    for id in topological_order(model) {
        if model.requirements.contains_key(id.as_str()) {
            let level = scenario.level(id.as_str());
            let status = grade_requirement(level);
            states.insert(id.clone(), SourceState { raw: level, raw_status: status, indeterminate: false });
            nodes.insert(id, NodeOutcome { achieved: level, status, contributions: Vec::new(), baseline_change: None });
            continue;
        }
        let objective = &model.objectives[id.as_str()];
        if let Some(&v) = scenario.pinned.get(id.as_str()) {
            let status = grade(objective, v);
            states.insert(id.clone(), SourceState { raw: v, raw_status: status, indeterminate: false });
            let baseline_change = baseline_change(objective, v);
            nodes.insert(id, NodeOutcome { achieved: v, status, contributions: Vec::new(), baseline_change });
            continue;
        }

        let (mut active, open_groups) = active_links(model, id.as_str(), scenario);
        let mut indeterminate = false;
        for (group, members) in open_groups {
            match scenario.options.or_policy {
                OrPolicy::Require => {
                    indeterminate = true;
                    flags.push(AuditFlag::new(
                        "UNSELECTED_OR",
                        group,
                        format!("OR group '{group}' into '{id}' has no selected link"),
                    ));
                }
                OrPolicy::Best => {
                    // Largest adjusted contribution wins; ties go to the
                    // smallest link id.
                    let mut best: Option<(&ContributionLink, f64)> = None;
                    for l in members {
                        let src = states[l.source.as_str()];
                        if src.indeterminate {
                            continue;
                        }
                        let mut scratch = Vec::new();
                        let raw = raw_contribution(model, l, src, scenario, &mut scratch)?;
                        let value = if adjust { raw * link_confidence(l, scenario) } else { raw };
                        if best.is_none_or(|(_, b)| value > b) {
                            best = Some((l, value));
                        }
                    }
                    match best {
                        Some((l, _)) => active.push(l),
                        None => indeterminate = true,
                    }
                }
            }
        }
        active.sort_by(|a, b| a.id.cmp(&b.id));

        let mut contributions = Vec::with_capacity(active.len());
        let (mut raw_sum, mut achieved) = (0.0, 0.0);
        for l in active {
            let src = states[l.source.as_str()];
            if src.indeterminate {
                indeterminate = true;
                continue;
            }
            let raw = raw_contribution(model, l, src, scenario, &mut flags)?;
            let confidence = link_confidence(l, scenario);
            let adjusted = if adjust { raw * confidence } else { raw };
            raw_sum += raw;
            achieved += adjusted;
            contributions.push(ContributionOutcome { link: l.id.clone(), raw, confidence, adjusted });
        }
        let (status, raw_status) = if indeterminate {
            (Status::Indeterminate, Status::Indeterminate)
        } else {
            (grade(objective, achieved), grade(objective, raw_sum))
        };
        states.insert(id.clone(), SourceState { raw: raw_sum, raw_status, indeterminate });
        let baseline_change = baseline_change(objective, achieved);
        nodes.insert(id, NodeOutcome { achieved, status, contributions, baseline_change });
    }

    let (root_utilities, total_utility) = utilities(model, &nodes);
    flags.sort();
    flags.dedup();
    Ok(EvaluationResult {
        scenario: scenario.id.clone(),
        confidence_adjusted: adjust,
        nodes,
        root_utilities,
        total_utility,
        audit_flags: flags,
        interval_results: None,
        note: adjust.then(|| CONFIDENCE_CAVEAT.to_string()),
    })
}

fn baseline_change(objective: &Objective, achieved: f64) -> Option<f64> {
    if !objective.scale.is_percent() {
        return None;
    }
    objective.magnitude.as_is.map(|a| model::to_f64(a) * achieved / 100.0)
}

/// Utility of a root objective's achieved value. Roots without a declared
/// utility function ramp linearly from 0 at no change to 1 at the target.
pub fn root_utility(model: &GoalModel, root: &str, achieved: f64) -> Option<f64> {
    let objective = model.objectives.get(root)?;
    let u = match model.utilities.get(root) {
        Some(f) => f.evaluate(achieved).ok()?,
        None => {
            let target = objective.target();
            if target > 0.0 {
                achieved / target
            } else if achieved >= target {
                1.0
            } else {
                0.0
            }
        }
    };
    Some(u.clamp(0.0, 1.0))
}

fn utilities(model: &GoalModel, nodes: &BTreeMap<Id, NodeOutcome>) -> (BTreeMap<Id, f64>, Option<f64>) {
    let weights = model.normalized_weights();
    let mut per_root = BTreeMap::new();
    let mut total = Some(0.0);
    for (root, w) in &weights {
        let outcome = &nodes[root.as_str()];
        let u = if outcome.status == Status::Indeterminate {
            None
        } else {
            root_utility(model, root.as_str(), outcome.achieved)
        };
        match u {
            Some(u) => {
                per_root.insert(root.clone(), u);
                total = total.map(|t| t + w * u);
            }
            None => total = None,
        }
    }
    if weights.is_empty() {
        total = None;
    }
    (per_root, total)
}
