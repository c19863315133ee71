//! Static checks on table functions that evaluation cannot fix on its own.

use crate::functions::Monotonicity;
use crate::model::{GoalModel, Quantification};

use super::AuditFlag;

/// Flags that depend on the model alone.
///
/// * `EXPAND_GRAPH`: a non-monotone table function; the objective should be
///   split so that each piece is monotone.
/// * `MIXED_POLARITY`: the function's outputs take both signs, so one link
///   both helps and hurts its target.
/// * `STALE_DOMAIN`: the function's domain does not cover the source's
///   declared range (`[0, 1]` for requirements).
pub fn audit(model: &GoalModel) -> Vec<AuditFlag> {
    let mut flags = Vec::new();
    for link in model.contributions.values() {
        let Quantification::Multi { function } = &link.quantification else {
            continue;
        };
        if let Monotonicity::NonMonotone { offending } = function.monotonicity() {
            let segments: Vec<String> = offending.iter().map(usize::to_string).collect();
            flags.push(AuditFlag::new(
                "EXPAND_GRAPH",
                &link.id,
                format!(
                    "function is not monotone (segments {}); split '{}' into monotone parts",
                    segments.join(", "),
                    link.target
                ),
            ));
        }
        let knots = function.knots();
        let positive = knots.iter().any(|&(_, y)| y > 0.0);
        let negative = knots.iter().any(|&(_, y)| y < 0.0);
        if positive && negative {
            flags.push(AuditFlag::new(
                "MIXED_POLARITY",
                &link.id,
                "function output changes sign; the link both helps and hurts its target",
            ));
        }
        let range = if model.requirements.contains_key(link.source.as_str()) {
            Some((0.0, 1.0))
        } else {
            model.objectives.get(link.source.as_str()).and_then(|o| o.declared_range())
        };
        if let Some((worst, best)) = range {
            let (lo, hi) = function.domain();
            if worst < lo || best > hi {
                flags.push(AuditFlag::new(
                    "STALE_DOMAIN",
                    &link.id,
                    format!("domain [{lo}, {hi}] does not cover source range [{worst}, {best}] of '{}'", link.source),
                ));
            }
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;

    fn flags(function: &str, worst_best: &str) -> Vec<String> {
        let text = format!(
            "requirement r {{\n  kind: F\n  headline: \"R\"\n  fit: \"done\"\n}}\n\
             objective s {{\n  activity: Increased\n  focus: \"S\"\n  direction: increase\n  target: 40\n  threshold: 10\n  unit: pts\n{worst_best}}}\n\
             objective t {{\n  activity: Increased\n  focus: \"T\"\n  direction: increase\n  target: 2\n  threshold: 1\n  unit: items\n}}\n\
             function f {{\n  interpolation: linear\n  points = {function}\n}}\n\
             link H {{\n  from: s\n  to: t\n  effect: increase\n  unit: items\n  function: f\n  confidence: perfect\n}}\n"
        );
        let p = dsl::parse(&text).unwrap();
        audit(&p.model).into_iter().map(|f| format!("{}@{}", f.code, f.location)).collect()
    }

    #[test]
    fn narrow_domain_is_stale() {
        let f = flags("[(0, 0), (50, 2)]", "  worst: 0\n  best: 100\n");
        assert_eq!(f, ["STALE_DOMAIN@H"]);
    }

    #[test]
    fn covering_domain_is_clean() {
        assert!(flags("[(0, 0), (100, 2)]", "  worst: 0\n  best: 100\n").is_empty());
        // No declared range, nothing to compare.
        assert!(flags("[(0, 0), (50, 2)]", "").is_empty());
    }

    #[test]
    fn hump_expands_and_sign_change_is_mixed() {
        assert_eq!(flags("[(0, 0), (50, 2), (100, 1)]", ""), ["EXPAND_GRAPH@H"]);
        assert_eq!(flags("[(0, -1), (100, 1)]", ""), ["MIXED_POLARITY@H"]);
    }
}
