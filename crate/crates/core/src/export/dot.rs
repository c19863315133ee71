use std::fmt::Write;

use crate::eval::{EvaluationResult, Status};
use crate::model::{format_label, natural_cmp, roots, GoalModel, GroupMode, NodeRef};

use super::{display_value, fixed2};

/// Fill colour per status.
pub const STATUS_COLORS: [(Status, &str); 4] = [
    (Status::Satisfied, "palegreen"),
    (Status::ThresholdMet, "khaki"),
    (Status::Unsatisfied, "lightcoral"),
    (Status::Indeterminate, "lightgray"),
];

fn color(status: Status) -> &'static str {
    STATUS_COLORS.iter().find(|(s, _)| *s == status).map(|(_, c)| *c).unwrap_or("white")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn sorted<'a, I: Iterator<Item = &'a crate::model::Id>>(ids: I) -> Vec<&'a crate::model::Id> {
    let mut v: Vec<_> = ids.collect();
    v.sort_by(|a, b| natural_cmp(a.as_str(), b.as_str()));
    v
}

/// Renders the model as a Graphviz digraph, bottom to top. With a result,
/// nodes are filled by status and edges show adjusted contributions.
pub fn to_dot(model: &GoalModel, result: Option<&EvaluationResult>) -> String {
    let mut out = String::from("digraph goalgraph {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\", fontsize=10];\n");

    for id in sorted(model.requirements.keys()) {
        let node = NodeRef::Requirement(&model.requirements[id.as_str()]);
        let mut attrs = vec![format!("label={}", quote(&format_label(node))), "shape=hexagon".to_string()];
        if let Some(n) = result.and_then(|r| r.node(id.as_str())) {
            attrs.push("style=filled".into());
            attrs.push(format!("fillcolor={}", color(n.status)));
        }
        let _ = writeln!(out, "  {} [{}];", quote(id.as_str()), attrs.join(", "));
    }
    for id in sorted(model.objectives.keys()) {
        let o = &model.objectives[id.as_str()];
        let mut label = format_label(NodeRef::Objective(o));
        let mut attrs = vec!["shape=box".to_string()];
        match result.and_then(|r| r.node(id.as_str())) {
            Some(n) => {
                let (shown, rounded) = display_value(model, id.as_str(), n.achieved);
                label.push_str(&format!("\nachieved {shown} ({})", n.status.as_str()));
                attrs.push("style=\"rounded,filled\"".into());
                attrs.push(format!("fillcolor={}", color(n.status)));
                if rounded {
                    attrs.push(format!("tooltip={}", quote(&format!("raw {}", n.achieved))));
                }
            }
            None => attrs.push("style=rounded".into()),
        }
        attrs.insert(0, format!("label={}", quote(&label)));
        let _ = writeln!(out, "  {} [{}];", quote(id.as_str()), attrs.join(", "));
    }
    for id in sorted(model.softgoals.keys()) {
        let s = &model.softgoals[id.as_str()];
        let _ = writeln!(
            out,
            "  {} [label={}, shape=ellipse, style=dashed];",
            quote(id.as_str()),
            quote(&format!("{}\n({})", s.statement, s.level.as_str()))
        );
    }
    for id in sorted(model.beliefs.keys()) {
        let b = &model.beliefs[id.as_str()];
        let _ = writeln!(out, "  {} [label={}, shape=note];", quote(id.as_str()), quote(&b.statement));
    }

    let reqs = sorted(model.requirements.keys());
    if !reqs.is_empty() {
        let list: Vec<String> = reqs.iter().map(|id| quote(id.as_str())).collect();
        let _ = writeln!(out, "  {{ rank=min; {}; }}", list.join("; "));
    }
    let mut top = roots(model);
    top.sort_by(|a, b| natural_cmp(a.as_str(), b.as_str()));
    if !top.is_empty() {
        let list: Vec<String> = top.iter().map(|id| quote(id.as_str())).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", list.join("; "));
    }

    for id in sorted(model.contributions.keys()) {
        let l = &model.contributions[id.as_str()];
        let mut label = format!("{} {} @{}", l.amount_text(), l.effect.noun(), fixed2(l.confidence.as_f64()));
        if let Some(g) = &l.group {
            let mode = if g.mode == GroupMode::And { "AND" } else { "OR" };
            label.push_str(&format!(" {mode}:{}", g.id));
        }
        if let Some(c) = result.and_then(|r| r.contribution(id.as_str())) {
            label.push_str(&format!("\nadjusted {}", fixed2(c.adjusted)));
        }
        let _ = writeln!(
            out,
            "  {} -> {} [id={}, label={}];",
            quote(l.source.as_str()),
            quote(l.target.as_str()),
            quote(l.id.as_str()),
            quote(&label)
        );
    }
    for d in &model.decompositions {
        let _ = writeln!(
            out,
            "  {} -> {} [arrowhead=tee, label=\"decomposes\"];",
            quote(d.child.as_str()),
            quote(d.parent.as_str())
        );
    }
    for t in &model.traces {
        let _ =
            writeln!(out, "  {} -> {} [style=dotted, arrowhead=none];", quote(t.from.as_str()), quote(t.to.as_str()));
    }
    for id in sorted(model.beliefs.keys()) {
        let b = &model.beliefs[id.as_str()];
        // Beliefs on links point at the link's target, naming the link.
        let (to, label) = match model.contributions.get(b.attached_to.as_str()) {
            Some(l) => (l.target.as_str(), format!("on {}", l.id)),
            None => (b.attached_to.as_str(), String::new()),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed, arrowhead=none, label={}];",
            quote(id.as_str()),
            quote(to),
            quote(&label)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_is_a_bare_digraph() {
        let dot = to_dot(&GoalModel::default(), None);
        assert!(dot.starts_with("digraph goalgraph {"));
        assert!(dot.ends_with("}\n"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn quoting_escapes_specials() {
        assert_eq!(quote("a\"b\\c\nd"), "\"a\\\"b\\\\c\\nd\"");
    }
}
