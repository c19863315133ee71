//! Scenario comparison, one-dimensional sweeps and knee detection.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{evaluate_trusted, EvalError, EvaluationResult, Scenario, Status};
use crate::functions::{Monotonicity, TableFunction};
use crate::model::{self, natural_cmp, GoalModel, Id, RequirementKind};

/// Row name used for the weighted total in comparisons.
pub const TOTAL_UTILITY_ROW: &str = "total_utility";

pub const DEFAULT_DROP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WhatIfError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("DUPLICATE_SCENARIO: scenario '{0}' appears more than once")]
    DuplicateScenario(String),
    #[error("UNKNOWN_BASELINE: baseline '{0}' is not in the set")]
    UnknownBaseline(String),
    #[error("UNKNOWN_NODE: '{0}' is not a requirement or objective")]
    UnknownNode(String),
    #[error("BAD_RANGE: {0}")]
    BadRange(String),
    #[error("NON_MONOTONE: function is not increasing")]
    NonMonotone,
}

impl WhatIfError {
    pub fn code(&self) -> &str {
        match self {
            WhatIfError::Eval(e) => e.code(),
            WhatIfError::DuplicateScenario(_) => "DUPLICATE_SCENARIO",
            WhatIfError::UnknownBaseline(_) => "UNKNOWN_BASELINE",
            WhatIfError::UnknownNode(_) => "UNKNOWN_NODE",
            WhatIfError::BadRange(_) => "BAD_RANGE",
            WhatIfError::NonMonotone => "NON_MONOTONE",
        }
    }
}

/// Named scenarios with one baseline. Column order is declaration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub baseline: String,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn new(scenarios: Vec<Scenario>, baseline: impl Into<String>) -> Result<Self, WhatIfError> {
        let set = ScenarioSet { baseline: baseline.into(), scenarios };
        set.check()?;
        Ok(set)
    }

    pub fn check(&self) -> Result<(), WhatIfError> {
        let mut seen = BTreeSet::new();
        for s in &self.scenarios {
            if !seen.insert(s.id.as_str()) {
                return Err(WhatIfError::DuplicateScenario(s.id.clone()));
            }
        }
        if !seen.contains(self.baseline.as_str()) {
            return Err(WhatIfError::UnknownBaseline(self.baseline.clone()));
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub achieved: Option<f64>,
    pub status: Option<Status>,
    /// Difference from the baseline column.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub node: String,
    pub root: bool,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub baseline: String,
    pub columns: Vec<String>,
    /// Scenario id to error text, for columns that failed to evaluate.
    pub errors: BTreeMap<String, String>,
    pub rows: Vec<ComparisonRow>,
}

fn check_model(model: &GoalModel) -> Result<(), EvalError> {
    let report = model::validate(model);
    if report.has_errors() {
        return Err(EvalError::InvalidModel(report.errors().cloned().collect()));
    }
    Ok(())
}

/// Objective ids in display order.
pub fn objective_ids(model: &GoalModel) -> Vec<&Id> {
    let mut ids: Vec<&Id> = model.objectives.keys().collect();
    ids.sort_by(|a, b| natural_cmp(a.as_str(), b.as_str()));
    ids
}

/// Evaluates every scenario of the set (in parallel) and tabulates each
/// objective plus the total utility against the baseline.
pub fn compare(model: &GoalModel, set: &ScenarioSet) -> Result<ComparisonTable, WhatIfError> {
    set.check()?;
    check_model(model)?;
    let results: Vec<Result<EvaluationResult, EvalError>> =
        set.scenarios.par_iter().map(|s| evaluate_trusted(model, s)).collect();
    let columns: Vec<String> = set.scenarios.iter().map(|s| s.id.clone()).collect();
    let errors: BTreeMap<String, String> = columns
        .iter()
        .zip(&results)
        .filter_map(|(c, r)| r.as_ref().err().map(|e| (c.clone(), e.to_string())))
        .collect();
    let base_index = columns.iter().position(|c| *c == set.baseline).unwrap_or(0);
    let roots: BTreeSet<Id> = model::roots(model).into_iter().collect();

    let mut rows = Vec::new();
    type Picked = (Option<f64>, Option<Status>);
    let row = |node: String, root: bool, pick: &dyn Fn(&EvaluationResult) -> Picked| {
        let picked: Vec<Picked> = results.iter().map(|r| r.as_ref().map(pick).unwrap_or((None, None))).collect();
        let base = picked[base_index].0;
        let cells = picked
            .into_iter()
            .map(|(achieved, status)| Cell { achieved, status, delta: achieved.zip(base).map(|(a, b)| a - b) })
            .collect();
        ComparisonRow { node, root, cells }
    };
    for id in objective_ids(model) {
        rows.push(row(id.to_string(), roots.contains(id), &|r: &EvaluationResult| match r.node(id.as_str()) {
            Some(n) if n.status == Status::Indeterminate => (None, Some(n.status)),
            Some(n) => (Some(n.achieved), Some(n.status)),
            None => (None, None),
        }));
    }
    rows.push(row(TOTAL_UTILITY_ROW.to_string(), false, &|r: &EvaluationResult| (r.total_utility, None)));
    Ok(ComparisonTable { baseline: set.baseline.clone(), columns, errors, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub input: f64,
    /// Every objective's achieved value at this input.
    pub achieved: BTreeMap<Id, f64>,
    pub status: BTreeMap<Id, Status>,
    pub total_utility: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub node: Id,
    pub samples: Vec<SweepSample>,
}

/// `steps` evenly spaced inputs from `from` to `to` inclusive.
pub fn sweep_inputs(from: f64, to: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps).map(|i| if i + 1 == steps { to } else { from + (to - from) * i as f64 / last }).collect()
}

/// The scenario a sweep evaluates at one input level.
///
/// Requirements take the input as their level; functional ones snap to 1 at
/// 0.5 and above. Objectives are pinned to the input.
pub fn sweep_scenario(model: &GoalModel, base: &Scenario, node: &str, input: f64) -> Scenario {
    let mut s = base.clone();
    match model.requirements.get(node) {
        Some(r) => {
            let level = if r.kind == RequirementKind::Functional {
                if input >= 0.5 {
                    1.0
                } else {
                    0.0
                }
            } else {
                input
            };
            s.requirement_levels.insert(r.id.clone(), level);
        }
        None => {
            s.pinned.insert(Id::from(node), input);
        }
    }
    s
}

/// Evaluates the model at `steps` levels of one node, holding all else
/// fixed.
pub fn sweep(
    model: &GoalModel,
    scenario: &Scenario,
    node: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepResult, WhatIfError> {
    let is_requirement = model.requirements.contains_key(node);
    if !is_requirement && !model.objectives.contains_key(node) {
        return Err(WhatIfError::UnknownNode(node.to_string()));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(WhatIfError::BadRange(format!("need from < to, got {from} and {to}")));
    }
    if steps < 2 {
        return Err(WhatIfError::BadRange(format!("need at least 2 steps, got {steps}")));
    }
    if is_requirement && (from < 0.0 || to > 1.0) {
        return Err(WhatIfError::BadRange(format!("requirement levels lie in [0, 1], got [{from}, {to}]")));
    }
    check_model(model)?;
    let samples = sweep_inputs(from, to, steps)
        .into_par_iter()
        .map(|input| {
            let r = evaluate_trusted(model, &sweep_scenario(model, scenario, node, input))?;
            let mut achieved = BTreeMap::new();
            let mut status = BTreeMap::new();
            for id in model.objectives.keys() {
                let n = &r.nodes[id.as_str()];
                achieved.insert(id.clone(), n.achieved);
                status.insert(id.clone(), n.status);
            }
            Ok(SweepSample { input, achieved, status, total_utility: r.total_utility })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(SweepResult { node: Id::from(node), samples })
}

/// First knot after which every forward secant slope is below
/// `drop_fraction` times the steepest secant slope.
pub fn diminishing_returns(f: &TableFunction, drop_fraction: f64) -> Result<Option<(f64, f64)>, WhatIfError> {
    if !(drop_fraction > 0.0 && drop_fraction <= 1.0) {
        return Err(WhatIfError::BadRange(format!("drop fraction {drop_fraction} outside (0, 1]")));
    }
    if f.monotonicity() != Monotonicity::Increasing {
        return Err(WhatIfError::NonMonotone);
    }
    let knots = f.knots();
    let slopes: Vec<f64> = knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let max = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return Ok(None);
    }
    let limit = drop_fraction * max;
    Ok((1..slopes.len()).find(|&k| slopes[k..].iter().all(|&s| s < limit)).map(|k| knots[k]))
}
