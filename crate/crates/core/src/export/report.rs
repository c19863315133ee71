use std::fmt::Write;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::eval::{AuditFlag, EvaluationResult, Status, CONFIDENCE_CAVEAT};
use crate::model::{format_label, natural_cmp, GoalModel, Id, NodeRef};

use super::{contribution_text, display_value, fixed2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRow {
    pub link: Id,
    pub contribution: String,
    pub confidence: f64,
    /// Absent when the link took no part in the evaluation.
    pub raw: Option<f64>,
    pub adjusted: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveRow {
    pub objective: Id,
    pub label: String,
    pub achieved: Option<f64>,
    pub threshold: Decimal,
    pub target: Decimal,
    pub status: Option<Status>,
}

/// Tabular view of one evaluation, shared by the markdown, CSV and JSON
/// forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub confidence_adjusted: bool,
    pub links: Vec<LinkRow>,
    pub objectives: Vec<ObjectiveRow>,
    pub total_utility: Option<f64>,
    pub audit_flags: Vec<AuditFlag>,
    pub note: String,
}

pub fn report(model: &GoalModel, result: &EvaluationResult) -> Report {
    let mut link_ids: Vec<_> = model.contributions.keys().collect();
    link_ids.sort_by(|a, b| natural_cmp(a.as_str(), b.as_str()));
    let links = link_ids
        .into_iter()
        .map(|id| {
            let l = &model.contributions[id.as_str()];
            let c = result.contribution(id.as_str());
            LinkRow {
                link: id.clone(),
                contribution: contribution_text(model, l),
                confidence: l.confidence.as_f64(),
                raw: c.map(|c| c.raw),
                adjusted: c.map(|c| c.adjusted),
            }
        })
        .collect();
    let mut objective_ids: Vec<_> = model.objectives.keys().collect();
    objective_ids.sort_by(|a, b| natural_cmp(a.as_str(), b.as_str()));
    let objectives = objective_ids
        .into_iter()
        .map(|id| {
            let o = &model.objectives[id.as_str()];
            let n = result.node(id.as_str());
            ObjectiveRow {
                objective: id.clone(),
                label: format_label(NodeRef::Objective(o)),
                achieved: n.map(|n| n.achieved),
                threshold: o.magnitude.threshold.normalize(),
                target: o.magnitude.target.normalize(),
                status: n.map(|n| n.status),
            }
        })
        .collect();
    Report {
        scenario: result.scenario.clone(),
        confidence_adjusted: result.confidence_adjusted,
        links,
        objectives,
        total_utility: result.total_utility,
        audit_flags: result.audit_flags.clone(),
        note: CONFIDENCE_CAVEAT.to_string(),
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Markdown report: one row per contribution link, then objective statuses.
/// Links that took no part in the evaluation show `-`.
pub fn report_markdown(model: &GoalModel, result: &EvaluationResult) -> String {
    let r = report(model, result);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Scenario: {} (confidence adjustment {})\n",
        r.scenario,
        if r.confidence_adjusted { "on" } else { "off" }
    );
    out.push_str("| Link | [Contribution] [Activity] [Scale] | Confidence | Adjusted |\n");
    out.push_str("|---|---|---|---|\n");
    for row in &r.links {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            cell(row.link.as_str()),
            cell(&row.contribution),
            fixed2(row.confidence),
            row.adjusted.map(fixed2).unwrap_or_else(|| "-".into())
        );
    }
    if !r.objectives.is_empty() {
        out.push_str("\n| Objective | Label | Achieved | Threshold | Target | Status |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for row in &r.objectives {
            let achieved =
                row.achieved.map(|a| display_value(model, row.objective.as_str(), a).0).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                cell(row.objective.as_str()),
                cell(&row.label),
                achieved,
                row.threshold,
                row.target,
                row.status.map(Status::as_str).unwrap_or("-")
            );
        }
        match r.total_utility {
            Some(u) => {
                let _ = writeln!(out, "\nTotal utility: {u:.4}");
            }
            None => out.push_str("\nTotal utility: indeterminate\n"),
        }
    }
    if !r.audit_flags.is_empty() {
        out.push_str("\nFlags:\n");
        for f in &r.audit_flags {
            let _ = writeln!(out, "- {} at {}: {}", f.code, f.location, f.message);
        }
    }
    let _ = writeln!(out, "\n_{}_", r.note);
    out
}

/// CSV report with full-precision numbers. Link rows carry raw and adjusted
/// contributions; objective rows carry achieved value and status.
pub fn report_csv(model: &GoalModel, result: &EvaluationResult) -> String {
    let r = report(model, result);
    let mut w = csv::Writer::from_writer(Vec::new());
    let num = |v: Option<f64>| v.map(|v| (v + 0.0).to_string()).unwrap_or_default();
    let mut rows: Vec<[String; 9]> =
        vec![["row", "id", "description", "confidence", "raw", "adjusted", "threshold", "target", "status"]
            .map(String::from)];
    for l in &r.links {
        rows.push([
            "link".into(),
            l.link.to_string(),
            l.contribution.clone(),
            num(Some(l.confidence)),
            num(l.raw),
            num(l.adjusted),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    for o in &r.objectives {
        rows.push([
            "objective".into(),
            o.objective.to_string(),
            o.label.clone(),
            String::new(),
            String::new(),
            num(o.achieved),
            o.threshold.to_string(),
            o.target.to_string(),
            o.status.map(|s| s.as_str().to_string()).unwrap_or_default(),
        ]);
    }
    let blank = String::new;
    rows.push([
        "total_utility".into(),
        blank(),
        blank(),
        blank(),
        blank(),
        num(r.total_utility),
        blank(),
        blank(),
        blank(),
    ]);
    rows.push(["note".into(), blank(), r.note.clone(), blank(), blank(), blank(), blank(), blank(), blank()]);
    for row in rows {
        let _ = w.write_record(&row);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}
