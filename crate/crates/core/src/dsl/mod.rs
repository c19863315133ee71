//! The `.goal` text format.
//!
//! A file is a sequence of blocks, `kind id { key: value ... }`, with `#`
//! line comments. See `docs/dsl.md` for the grammar.

mod label;
mod lexer;
mod lower;
mod parser;
mod serialize;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eval::Scenario;
use crate::model::GoalModel;

pub use label::{parse_label, Label, LabelError};
pub use parser::{Block, BlockKind, Document, Entry, Value, ValueKind};
pub use serialize::{serialize, serialize_project};

/// 1-based position of a diagnostic. `length` counts characters and is 0 at
/// end of input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    /// Span from the start of `self` to the end of `other` when both sit on
    /// one line; otherwise just `self`.
    pub(crate) fn through(self, other: SourceSpan) -> SourceSpan {
        if other.line == self.line && other.column >= self.column {
            SourceSpan { length: other.column + other.length - self.column, ..self }
        } else {
            self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub code: String,
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(code: &str, span: SourceSpan, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError { code: code.to_string(), span, expected: expected.into(), found: found.into() }
    }

    pub fn message(&self) -> String {
        format!("expected {}, found {}", self.expected, self.found)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.code, self.message())
    }
}

impl std::error::Error for ParseError {}

/// Result of a successful parse.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub document: Document,
    pub model: GoalModel,
    /// Scenario blocks in source order.
    pub scenarios: Vec<Scenario>,
}

/// Parses `.goal` text.
///
/// On failure every error is returned, sorted by position. The parser skips
/// to the next block after an error, so one bad block does not hide
/// problems in later ones.
pub fn parse(text: &str) -> Result<Parsed, Vec<ParseError>> {
    let (tokens, mut errors) = lexer::lex(text);
    let end = end_span(text);
    let (document, parse_errors) = parser::parse_document(&tokens, end);
    errors.extend(parse_errors);
    let (model, scenarios, lower_errors) = lower::lower(&document);
    errors.extend(lower_errors);
    if errors.is_empty() {
        Ok(Parsed { document, model, scenarios })
    } else {
        errors.sort_by_key(|e| e.span);
        errors.dedup();
        Err(errors)
    }
}

/// Parses raw bytes; invalid UTF-8 is reported at the first bad byte.
pub fn parse_bytes(bytes: &[u8]) -> Result<Parsed, Vec<ParseError>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let mut span = end_span(valid);
            span.length = 1;
            Err(vec![ParseError::new("PARSE_INVALID_UTF8", span, "UTF-8 text", "an invalid byte sequence")])
        }
    }
}

/// Parses a scenario-only file; returns the scenarios it declares.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>, Vec<ParseError>> {
    let parsed = parse(text)?;
    Ok(parsed.scenarios)
}

fn end_span(text: &str) -> SourceSpan {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    SourceSpan { line, column, length: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Direction;
    use rust_decimal::Decimal;

    const OBJ7: &str = r#"
objective obj7 {
  activity: Reduced
  object: "GT-BU FS"
  focus: "Average Manufacturing Lead Time"
  direction: reduction
  target: 3
  threshold: 2
  as_is: 6
  unit: months
}
"#;

    #[test]
    fn objective_block_magnitude() {
        let p = parse(OBJ7).unwrap();
        let m = &p.model.objectives["obj7"].magnitude;
        assert_eq!(m.target, Decimal::from(3));
        assert_eq!(m.threshold, Decimal::from(2));
        assert_eq!(m.as_is, Some(Decimal::from(6)));
        assert_eq!(m.direction, Direction::Reduction);
    }

    #[test]
    fn empty_input_is_an_empty_model() {
        for text in ["", "   \n", "# only a comment\n"] {
            let p = parse(text).unwrap();
            assert!(p.model.is_empty() && p.scenarios.is_empty());
        }
    }

    #[test]
    fn missing_target_is_one_error_at_the_block() {
        let text = OBJ7.replace("  target: 3\n", "");
        let errs = parse(&text).unwrap_err();
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert_eq!(errs[0].code, "PARSE_MISSING_FIELD");
        assert_eq!((errs[0].span.line, errs[0].span.column), (2, 1));
    }

    #[test]
    fn errors_in_separate_blocks_are_all_reported() {
        let text = format!("objective a {{ target: }}\n{OBJ7}\nbogus x {{}}\n");
        let errs = parse(&text).unwrap_err();
        let codes: Vec<&str> = errs.iter().map(|e| e.code.as_str()).collect();
        assert_eq!(codes, ["PARSE_UNEXPECTED", "PARSE_UNKNOWN_BLOCK"]);
        assert!(errs.windows(2).all(|w| w[0].span <= w[1].span));
    }

    #[test]
    fn invalid_utf8_points_at_the_byte() {
        let errs = parse_bytes(b"objective a {\n  focus: \"x\xff\"\n}").unwrap_err();
        assert_eq!(errs[0].code, "PARSE_INVALID_UTF8");
        assert_eq!((errs[0].span.line, errs[0].span.column), (2, 12));
    }

    #[test]
    fn display_includes_position_and_code() {
        let e = ParseError::new("PARSE_UNEXPECTED", SourceSpan { line: 3, column: 7, length: 1 }, "'}'", "','");
        assert_eq!(e.to_string(), "3:7: PARSE_UNEXPECTED: expected '}', found ','");
    }
}
