use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Confidence, GoalModel, Id, RequirementKind};

/// How OR groups without an explicit selection are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrPolicy {
    /// The target stays indeterminate until the analyst picks a link.
    #[default]
    Require,
    /// Pick the link with the largest adjusted contribution.
    Best,
}

impl OrPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            OrPolicy::Require => "require",
            OrPolicy::Best => "best",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioOptions {
    pub confidence_adjust: bool,
    pub single_point_proration: bool,
    pub or_policy: OrPolicy,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions { confidence_adjust: true, single_point_proration: false, or_policy: OrPolicy::Require }
    }
}

/// An analyst's what-if choice set.
///
/// Requirements missing from `requirement_levels` are unimplemented (level
/// 0). `pinned` fixes an objective's achieved delta, ignoring its incoming
/// links; sweeps over objectives use it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub id: String,
    pub requirement_levels: BTreeMap<Id, f64>,
    pub or_selections: BTreeMap<Id, Id>,
    pub confidence_override: BTreeMap<Id, Confidence>,
    pub pinned: BTreeMap<Id, f64>,
    pub options: ScenarioOptions,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            id: "adhoc".to_string(),
            requirement_levels: BTreeMap::new(),
            or_selections: BTreeMap::new(),
            confidence_override: BTreeMap::new(),
            pinned: BTreeMap::new(),
            options: ScenarioOptions::default(),
        }
    }
}

impl Scenario {
    pub fn named(id: impl Into<String>) -> Self {
        Scenario { id: id.into(), ..Scenario::default() }
    }

    /// Every requirement fully implemented.
    pub fn all_satisfied(model: &GoalModel) -> Self {
        let mut s = Scenario::named("all");
        s.requirement_levels = model.requirements.keys().map(|id| (id.clone(), 1.0)).collect();
        s
    }

    pub fn with_level(mut self, requirement: &str, level: f64) -> Self {
        self.requirement_levels.insert(Id::from(requirement), level);
        self
    }

    pub fn with_selection(mut self, group: &str, link: &str) -> Self {
        self.or_selections.insert(Id::from(group), Id::from(link));
        self
    }

    pub fn with_confidence_adjust(mut self, on: bool) -> Self {
        self.options.confidence_adjust = on;
        self
    }

    pub fn level(&self, requirement: &str) -> f64 {
        self.requirement_levels.get(requirement).copied().unwrap_or(0.0)
    }

    /// Checks the scenario against a model; returns one message per problem.
    pub fn check(&self, model: &GoalModel) -> Vec<String> {
        let mut problems = Vec::new();
        for (id, &level) in &self.requirement_levels {
            match model.requirements.get(id.as_str()) {
                None => problems.push(format!("unknown requirement '{id}'")),
                Some(r) => {
                    if !level.is_finite() || !(0.0..=1.0).contains(&level) {
                        problems.push(format!("level {level} of '{id}' outside [0, 1]"));
                    } else if r.kind == RequirementKind::Functional && level != 0.0 && level != 1.0 {
                        problems.push(format!("functional requirement '{id}' takes level 0 or 1, not {level}"));
                    }
                }
            }
        }
        for (group, link) in &self.or_selections {
            match model.contributions.get(link.as_str()) {
                Some(l) if l.group.as_ref().is_some_and(|g| &g.id == group) => {}
                _ => problems.push(format!("selection '{link}' is not a link of group '{group}'")),
            }
        }
        for (link, c) in &self.confidence_override {
            if !model.contributions.contains_key(link.as_str()) {
                problems.push(format!("confidence override for unknown link '{link}'"));
            }
            let v = c.as_f64();
            if !(0.0..=1.0).contains(&v) {
                problems.push(format!("confidence override {v} for '{link}' outside [0, 1]"));
            }
        }
        for (id, &v) in &self.pinned {
            if !model.objectives.contains_key(id.as_str()) {
                problems.push(format!("pinned value for unknown objective '{id}'"));
            } else if !v.is_finite() {
                problems.push(format!("pinned value for '{id}' is not finite"));
            }
        }
        problems
    }
}
