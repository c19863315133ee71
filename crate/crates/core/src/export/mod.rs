//! DOT diagrams, Table-2-style reports and the versioned JSON mirror.

mod dot;
mod json;
mod report;

pub use dot::{to_dot, STATUS_COLORS};
pub use json::{from_json, model_from_json, to_json, to_json_value, JsonError, SCHEMA_VERSION};
pub use report::{report, report_csv, report_markdown, LinkRow, ObjectiveRow, Report};

use crate::model::{GoalModel, ScaleKind};

/// Two decimals, never `-0.00`.
pub(crate) fn fixed2(v: f64) -> String {
    format!("{:.2}", v + 0.0)
}

/// Display form of an achieved value: discrete scales round half to even.
pub(crate) fn display_value(model: &GoalModel, node: &str, v: f64) -> (String, bool) {
    match model.objectives.get(node) {
        Some(o) if o.scale.kind == ScaleKind::Discrete => {
            let r = v.round_ties_even() + 0.0;
            (format!("{r}"), r != v)
        }
        _ => (fixed2(v), false),
    }
}

/// Contribution text in Table-2 form: `[20%] Reduction in Time Required to
/// Design`.
pub fn contribution_text(model: &GoalModel, link: &crate::model::ContributionLink) -> String {
    let focus = model.objectives.get(link.target.as_str()).map(|o| o.focus.as_str()).unwrap_or("");
    format!("{} {} in {}", link.amount_text(), link.effect.noun(), focus)
}
