use super::{with_unit, NodeRef};

/// Renders the compact GRL label of a node.
///
/// Requirements render as `{F/NF}[Requirement](Fit Criterion)` and
/// objectives as `Activity[Object Focus](Magnitude)`. Soft goals and
/// beliefs render as their statement.
pub fn format_label(node: NodeRef<'_>) -> String {
    match node {
        NodeRef::Requirement(r) => {
            format!("{}[{}]({})", r.kind.prefix(), r.headline, r.fit.text)
        }
        NodeRef::Objective(o) => {
            let subject = match (o.object.is_empty(), o.focus.is_empty()) {
                (true, _) => o.focus.clone(),
                (false, true) => o.object.clone(),
                (false, false) => format!("{} {}", o.object, o.focus),
            };
            let magnitude = with_unit(&o.magnitude.target.normalize().to_string(), &o.scale.unit);
            format!("{}[{}]({})", o.activity, subject, magnitude)
        }
        NodeRef::SoftGoal(s) => s.statement.clone(),
        NodeRef::Belief(b) => b.statement.clone(),
    }
}
