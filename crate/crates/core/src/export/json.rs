use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::model::GoalModel;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JsonError {
    #[error("SCHEMA_VERSION: unsupported schema {0}")]
    SchemaVersion(String),
    #[error("SCHEMA_KIND: expected kind '{expected}', found '{found}'")]
    Kind { expected: String, found: String },
    #[error("MALFORMED_JSON: {0}")]
    Malformed(String),
}

impl JsonError {
    pub fn code(&self) -> &'static str {
        match self {
            JsonError::SchemaVersion(_) => "SCHEMA_VERSION",
            JsonError::Kind { .. } => "SCHEMA_KIND",
            JsonError::Malformed(_) => "MALFORMED_JSON",
        }
    }
}

/// Wraps a payload in the versioned envelope `{"schema", "kind", "data"}`.
/// Object keys come out sorted.
pub fn to_json_value<T: Serialize + ?Sized>(kind: &str, data: &T) -> Value {
    let data = serde_json::to_value(data).unwrap_or(Value::Null);
    json!({ "schema": SCHEMA_VERSION, "kind": kind, "data": data })
}

/// Pretty-printed envelope with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(kind: &str, data: &T) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(kind, data)).unwrap_or_default();
    s.push('\n');
    s
}

/// Unwraps an envelope of the given kind.
pub fn from_json<T: DeserializeOwned>(text: &str, kind: &str) -> Result<T, JsonError> {
    let v: Value = serde_json::from_str(text).map_err(|e| JsonError::Malformed(e.to_string()))?;
    let Value::Object(mut map) = v else {
        return Err(JsonError::Malformed("top level is not an object".into()));
    };
    match map.get("schema") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(JsonError::SchemaVersion(other.to_string())),
        None => return Err(JsonError::SchemaVersion("missing".into())),
    }
    match map.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => {}
        other => {
            return Err(JsonError::Kind { expected: kind.into(), found: other.unwrap_or("").to_string() });
        }
    }
    let data = map.remove("data").unwrap_or(Value::Null);
    serde_json::from_value(data).map_err(|e| JsonError::Malformed(e.to_string()))
}

pub fn model_from_json(text: &str) -> Result<GoalModel, JsonError> {
    from_json(text, "model")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_schema_is_rejected() {
        let err = model_from_json(r#"{"schema": 99, "kind": "model", "data": {}}"#).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_VERSION");
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let err = model_from_json(r#"{"schema": 1, "kind": "evaluation", "data": {}}"#).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_KIND");
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_json("model", &GoalModel::default());
        let kind = text.find("\"kind\"").unwrap();
        let data = text.find("\"data\"").unwrap();
        let schema = text.find("\"schema\"").unwrap();
        assert!(data < kind && kind < schema);
    }
}
