//! Interval evaluation: every quantity carries `[lo, hi]` bounds.
//!
//! Single-point halfwidths are added after confidence adjustment, so
//! confidence narrows only the point. OR choices and indeterminacy come from
//! the point evaluation, which always runs first.

use std::collections::BTreeMap;

use crate::model::{self, GoalModel, Id, Quantification};

use super::{
    evaluate, grade, grade_requirement, proration_function, sign, AuditFlag, EvalError, EvaluationResult,
    IntervalOutcome, Scenario, Status, GRADE_TOLERANCE,
};

type Iv = (f64, f64);

fn scale(iv: Iv, k: f64) -> Iv {
    let (a, b) = (iv.0 * k, iv.1 * k);
    (a.min(b), a.max(b))
}

fn widen(iv: Iv, h: f64) -> Iv {
    (iv.0 - h, iv.1 + h)
}

fn hull_zero(iv: Iv) -> Iv {
    (iv.0.min(0.0), iv.1.max(0.0))
}

/// Evaluates point values and `[lo, hi]` bounds for every node.
pub fn evaluate_interval(model: &GoalModel, scenario: &Scenario) -> Result<EvaluationResult, EvalError> {
    let mut result = evaluate(model, scenario)?;
    let adjust = scenario.options.confidence_adjust;
    let mut raw: BTreeMap<Id, Iv> = BTreeMap::new();
    let mut out: BTreeMap<Id, IntervalOutcome> = BTreeMap::new();
    let mut flags: Vec<AuditFlag> = Vec::new();

    for id in super::topological_order(model) {
        let point = &result.nodes[id.as_str()];
        if model.requirements.contains_key(id.as_str()) {
            let status = grade_requirement(point.achieved);
            raw.insert(id.clone(), (point.achieved, point.achieved));
            out.insert(
                id,
                IntervalOutcome {
                    lo: point.achieved,
                    hi: point.achieved,
                    pessimistic: status,
                    optimistic: status,
                    approximate: false,
                },
            );
            continue;
        }
        let objective = &model.objectives[id.as_str()];
        let (mut raw_sum, mut adj_sum, mut approximate) = ((0.0, 0.0), (0.0, 0.0), false);
        if let Some(&v) = scenario.pinned.get(id.as_str()) {
            raw_sum = (v, v);
            adj_sum = (v, v);
        }
        for c in &point.contributions {
            let link = &model.contributions[c.link.as_str()];
            let src = raw[link.source.as_str()];
            let s = sign(model, link);
            let (r, a) = match &link.quantification {
                Quantification::SinglePoint { estimate } => {
                    let p = model::to_f64(estimate.point);
                    let h = estimate.halfwidth.map(model::to_f64).unwrap_or(0.0);
                    let t = model.source_target(link.source.as_str()).unwrap_or(1.0);
                    let prorated =
                        if scenario.options.single_point_proration { proration_function(t, p) } else { None };
                    match prorated {
                        Some(f) => {
                            let img = f
                                .propagate_interval(src.0, src.1)
                                .map_err(|e| EvalError::Domain { link: link.id.clone(), source: e })?;
                            let centre = scale((img.lo, img.hi), s);
                            (widen(centre, h), widen(scale(centre, c.confidence), h))
                        }
                        None => {
                            let r = (s * p - h, s * p + h);
                            let a = (s * p * c.confidence - h, s * p * c.confidence + h);
                            if src.0 >= t - GRADE_TOLERANCE {
                                (r, a)
                            } else if src.1 < t - GRADE_TOLERANCE {
                                ((0.0, 0.0), (0.0, 0.0))
                            } else {
                                (hull_zero(r), hull_zero(a))
                            }
                        }
                    }
                }
                Quantification::Multi { function } => {
                    let img = function
                        .propagate_interval(src.0, src.1)
                        .map_err(|e| EvalError::Domain { link: link.id.clone(), source: e })?;
                    if img.approximate {
                        approximate = true;
                        flags.push(AuditFlag::new(
                            "NON_MONOTONE_INTERVAL",
                            &link.id,
                            "interval bounds for a cardinal spline come from grid sampling",
                        ));
                    }
                    let r = scale((img.lo, img.hi), s);
                    (r, scale(r, c.confidence))
                }
            };
            raw_sum = (raw_sum.0 + r.0, raw_sum.1 + r.1);
            adj_sum = (adj_sum.0 + a.0, adj_sum.1 + a.1);
        }
        let (lo, hi) = if adjust { adj_sum } else { raw_sum };
        let (pessimistic, optimistic) = if point.status == Status::Indeterminate {
            (Status::Indeterminate, Status::Indeterminate)
        } else {
            (grade(objective, lo), grade(objective, hi))
        };
        raw.insert(id.clone(), raw_sum);
        out.insert(id, IntervalOutcome { lo, hi, pessimistic, optimistic, approximate });
    }

    result.audit_flags.extend(flags);
    result.audit_flags.sort();
    result.audit_flags.dedup();
    result.interval_results = Some(out);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_by_a_negative_swaps_bounds() {
        assert_eq!(scale((1.0, 3.0), -2.0), (-6.0, -2.0));
        assert_eq!(scale((1.0, 3.0), 0.5), (0.5, 1.5));
    }

    #[test]
    fn hull_with_zero() {
        assert_eq!(hull_zero((1.0, 3.0)), (0.0, 3.0));
        assert_eq!(hull_zero((-2.0, -1.0)), (-2.0, 0.0));
        assert_eq!(widen((1.0, 3.0), 0.5), (0.5, 3.5));
    }
}
