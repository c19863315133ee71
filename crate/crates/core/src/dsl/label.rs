//! Compact GRL labels: `{F/NF}[Requirement](Fit Criterion)` and
//! `Activity[Object Focus](Magnitude)`.

use std::fmt;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::model::RequirementKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Label {
    Requirement {
        requirement_kind: RequirementKind,
        headline: String,
        fit: String,
    },
    /// `subject` is the object and focus as written; the label syntax does
    /// not separate them.
    Objective {
        activity: String,
        subject: String,
        magnitude: String,
    },
}

impl Label {
    /// Splits an objective magnitude such as `3 months` or `80%` into number
    /// and unit.
    pub fn magnitude_parts(&self) -> Option<(Decimal, String)> {
        let Label::Objective { magnitude, .. } = self else { return None };
        let m = magnitude.trim();
        if let Some(n) = m.strip_suffix('%') {
            return n.trim().parse().ok().map(|d| (d, "%".to_string()));
        }
        let (n, unit) = m.split_once(char::is_whitespace)?;
        n.parse().ok().map(|d| (d, unit.trim().to_string()))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Requirement { requirement_kind, headline, fit } => {
                write!(f, "{}[{}]({})", requirement_kind.prefix(), headline, fit)
            }
            Label::Objective { activity, subject, magnitude } => write!(f, "{activity}[{subject}]({magnitude})"),
        }
    }
}

/// `LABEL_SYNTAX` error with the 1-based column of the first violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("LABEL_SYNTAX at column {column}: {message}")]
pub struct LabelError {
    pub column: usize,
    pub message: String,
}

fn err(column: usize, message: &str) -> LabelError {
    LabelError { column, message: message.to_string() }
}

/// Index of the bracket closing the one opened at `open`.
fn closing(chars: &[char], open: usize, left: char, right: char) -> Option<usize> {
    let mut depth = 0usize;
    for (i, &c) in chars.iter().enumerate().skip(open) {
        if c == left {
            depth += 1;
        } else if c == right {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

pub fn parse_label(text: &str) -> Result<Label, LabelError> {
    let chars: Vec<char> = text.chars().collect();
    let Some(open) = chars.iter().position(|&c| c == '[') else {
        return Err(err(1, "expected 'Prefix[...](...)'; no '[' found"));
    };
    let prefix: String = chars[..open].iter().collect();
    if prefix.is_empty() {
        return Err(err(1, "missing activity or F/NF prefix before '['"));
    }
    if let Some(ws) = chars[..open].iter().position(|c| c.is_whitespace()) {
        return Err(err(ws + 1, "prefix must be a single word"));
    }
    let Some(close) = closing(&chars, open, '[', ']') else {
        return Err(err(chars.len() + 1, "unclosed '['"));
    };
    if chars.get(close + 1) != Some(&'(') {
        return Err(err(close + 2, "expected '(' after ']'"));
    }
    let Some(end) = closing(&chars, close + 1, '(', ')') else {
        return Err(err(chars.len() + 1, "unclosed '('"));
    };
    if end + 1 != chars.len() {
        return Err(err(end + 2, "unexpected text after ')'"));
    }
    let inner: String = chars[open + 1..close].iter().collect();
    let tail: String = chars[close + 2..end].iter().collect();
    if inner.trim().is_empty() {
        return Err(err(open + 2, "empty text inside '[]'"));
    }
    if tail.trim().is_empty() {
        return Err(err(close + 3, "empty text inside '()'"));
    }
    Ok(match prefix.as_str() {
        "F" => Label::Requirement { requirement_kind: RequirementKind::Functional, headline: inner, fit: tail },
        "NF" => Label::Requirement { requirement_kind: RequirementKind::NonFunctional, headline: inner, fit: tail },
        _ => Label::Objective { activity: prefix, subject: inner, magnitude: tail },
    })
}
