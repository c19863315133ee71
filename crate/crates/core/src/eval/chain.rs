use serde::{Deserialize, Serialize};

use crate::model::{GoalModel, Id};

use super::{link_confidence, EvaluationResult, Scenario};

/// Shown beside every chain summary.
pub const CHAIN_CONFIDENCE_NOTE: &str =
    "path confidence is the product of link confidences, assuming independent estimates";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopEffect {
    pub link: Id,
    pub from: Id,
    pub to: Id,
    pub confidence: f64,
    /// Product of link confidences from the start up to and including this
    /// hop.
    pub cumulative_confidence: f64,
    /// Contribution recorded by the evaluation, when the link was active.
    pub raw: Option<f64>,
    pub adjusted: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    /// Node ids from the starting requirement to a root objective.
    pub path: Vec<Id>,
    pub hops: Vec<HopEffect>,
    pub path_confidence: f64,
}

/// Every contribution path from `start` to a root, depth first in link-id
/// order.
pub fn summarize_chain(model: &GoalModel, result: &EvaluationResult, start: &str) -> Vec<ChainSummary> {
    let scenario = Scenario::default();
    let mut out = Vec::new();
    if model.node(start).is_none() {
        return out;
    }
    let mut path = vec![Id::from(start)];
    let mut hops = Vec::new();
    walk(model, result, &scenario, &mut path, &mut hops, &mut out);
    out
}

fn walk(
    model: &GoalModel,
    result: &EvaluationResult,
    scenario: &Scenario,
    path: &mut Vec<Id>,
    hops: &mut Vec<HopEffect>,
    out: &mut Vec<ChainSummary>,
) {
    let here = path.last().cloned().unwrap_or_default();
    let mut next: Vec<_> = model.outgoing(here.as_str()).collect();
    next.sort_by(|a, b| a.id.cmp(&b.id));
    if next.is_empty() {
        if !hops.is_empty() {
            out.push(ChainSummary {
                path: path.clone(),
                hops: hops.clone(),
                path_confidence: hops.last().map(|h| h.cumulative_confidence).unwrap_or(1.0),
            });
        }
        return;
    }
    for link in next {
        if path.contains(&link.target) {
            continue;
        }
        let recorded = result.contribution(link.id.as_str());
        let confidence = recorded.map(|c| c.confidence).unwrap_or_else(|| link_confidence(link, scenario));
        let before = hops.last().map(|h| h.cumulative_confidence).unwrap_or(1.0);
        hops.push(HopEffect {
            link: link.id.clone(),
            from: link.source.clone(),
            to: link.target.clone(),
            confidence,
            cumulative_confidence: before * confidence,
            raw: recorded.map(|c| c.raw),
            adjusted: recorded.map(|c| c.adjusted),
        });
        path.push(link.target.clone());
        walk(model, result, scenario, path, hops, out);
        path.pop();
        hops.pop();
    }
}
