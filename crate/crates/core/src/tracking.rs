//! As-is measurements over time and predicted-versus-actual reporting.
//!
//! Measurements persist as NDJSON, one record per line:
//! `{"objective":"obj7","timestamp":"2026-01-31T00:00:00Z","value":"4"}`.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Timelike, Utc};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{EvaluationResult, Status, GRADE_TOLERANCE};
use crate::model::{to_f64, Direction, GoalModel, Id};
use crate::whatif::objective_ids;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackingError {
    #[error("UNKNOWN_OBJECTIVE: '{0}' is not an objective of the model")]
    UnknownObjective(String),
    #[error("DUPLICATE_TIMESTAMP: '{objective}' already has a measurement at {timestamp}")]
    DuplicateTimestamp { objective: String, timestamp: String },
    #[error("MALFORMED_RECORD: line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("IO_ERROR: {0}")]
    Io(String),
}

impl TrackingError {
    pub fn code(&self) -> &'static str {
        match self {
            TrackingError::UnknownObjective(_) => "UNKNOWN_OBJECTIVE",
            TrackingError::DuplicateTimestamp { .. } => "DUPLICATE_TIMESTAMP",
            TrackingError::MalformedRecord { .. } => "MALFORMED_RECORD",
            TrackingError::Io(_) => "IO_ERROR",
        }
    }
}

/// An absolute level of an objective's focus at one instant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub objective: Id,
    pub timestamp: DateTime<Utc>,
    pub value: Decimal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    objective: String,
    timestamp: String,
    value: String,
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Parses `YYYY-MM-DDTHH:MM:SSZ` (any RFC 3339 offset is accepted and
/// converted to UTC); fractional seconds are rejected.
pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, String> {
    let t = DateTime::parse_from_rfc3339(s).map_err(|e| format!("bad timestamp '{s}': {e}"))?;
    if t.nanosecond() != 0 {
        return Err(format!("timestamp '{s}' has sub-second precision"));
    }
    Ok(t.with_timezone(&Utc))
}

impl Serialize for Measurement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.record().serialize(serializer)
    }
}

impl Measurement {
    fn record(&self) -> Record {
        Record {
            objective: self.objective.to_string(),
            timestamp: format_timestamp(&self.timestamp),
            value: self.value.normalize().to_string(),
        }
    }

    pub fn new(objective: impl Into<Id>, timestamp: &str, value: Decimal) -> Result<Self, String> {
        Ok(Measurement { objective: objective.into(), timestamp: parse_timestamp(timestamp)?, value })
    }

    /// One NDJSON line, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.record()).unwrap_or_default()
    }

    fn from_line(line: &str, number: usize) -> Result<Self, TrackingError> {
        let bad = |message: String| TrackingError::MalformedRecord { line: number, message };
        let r: Record = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let value: Decimal = r.value.parse().map_err(|_| bad(format!("bad decimal '{}'", r.value)))?;
        let timestamp = parse_timestamp(&r.timestamp).map_err(bad)?;
        Ok(Measurement { objective: Id(r.objective), timestamp, value })
    }
}

/// Append-only measurement series, kept in recording order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementStore {
    measurements: Vec<Measurement>,
}

impl MeasurementStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads NDJSON text. Blank lines are skipped; a final line without a
    /// newline is an interrupted append and is ignored.
    pub fn from_ndjson(text: &str) -> Result<Self, TrackingError> {
        let complete = match text.rfind('\n') {
            Some(i) => &text[..=i],
            None => "",
        };
        let mut store = MeasurementStore::new();
        for (i, line) in complete.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let m = Measurement::from_line(line, i + 1)?;
            store.insert(m)?;
        }
        Ok(store)
    }

    /// Loads a store file; a missing file is an empty store.
    pub fn load(path: &Path) -> Result<Self, TrackingError> {
        match fs::read_to_string(path) {
            Ok(text) => Self::from_ndjson(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(TrackingError::Io(e.to_string())),
        }
    }

    pub fn to_ndjson(&self) -> String {
        self.measurements.iter().map(|m| m.to_line() + "\n").collect()
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    fn insert(&mut self, m: Measurement) -> Result<(), TrackingError> {
        if self.measurements.iter().any(|o| o.objective == m.objective && o.timestamp == m.timestamp) {
            return Err(TrackingError::DuplicateTimestamp {
                objective: m.objective.to_string(),
                timestamp: format_timestamp(&m.timestamp),
            });
        }
        self.measurements.push(m);
        Ok(())
    }

    /// Appends a measurement of an objective of `model`.
    pub fn record(&mut self, model: &GoalModel, m: Measurement) -> Result<(), TrackingError> {
        if !model.objectives.contains_key(m.objective.as_str()) {
            return Err(TrackingError::UnknownObjective(m.objective.to_string()));
        }
        self.insert(m)
    }

    /// Measurements of one objective, oldest first.
    pub fn series(&self, objective: &str) -> Vec<&Measurement> {
        let mut s: Vec<&Measurement> = self.measurements.iter().filter(|m| m.objective.as_str() == objective).collect();
        s.sort_by_key(|m| m.timestamp);
        s
    }

    pub fn latest(&self, objective: &str) -> Option<&Measurement> {
        self.series(objective).pop()
    }
}

/// Records a measurement in the store file at `path`: the whole file is
/// checked first, then one line is appended.
pub fn append(path: &Path, model: &GoalModel, m: Measurement) -> Result<MeasurementStore, TrackingError> {
    let mut store = MeasurementStore::load(path)?;
    let line = m.to_line();
    store.record(model, m)?;
    let io = |e: std::io::Error| TrackingError::Io(e.to_string());
    // Drop a torn last line so the new record starts cleanly.
    if let Ok(bytes) = fs::read(path) {
        if !bytes.is_empty() && !bytes.ends_with(b"\n") {
            let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let file = OpenOptions::new().write(true).open(path).map_err(io)?;
            file.set_len(keep as u64).map_err(io)?;
        }
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    let mut buf = line;
    buf.push('\n');
    file.write_all(buf.as_bytes()).map_err(io)?;
    file.sync_data().map_err(io)?;
    Ok(store)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OnTrack,
    Behind,
    Exceeded,
    NoData,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::OnTrack => "on_track",
            Verdict::Behind => "behind",
            Verdict::Exceeded => "exceeded",
            Verdict::NoData => "no_data",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub objective: Id,
    pub predicted: Option<f64>,
    pub actual: Option<f64>,
    pub gap: Option<f64>,
    pub verdict: Verdict,
    pub measurements: usize,
    pub timeframe: String,
}

/// Achieved delta implied by a measured level, oriented by direction and
/// expressed on the objective's scale. Without an as-is value the earliest
/// measurement serves as the baseline.
fn actual_delta(model: &GoalModel, store: &MeasurementStore, objective: &str) -> Option<f64> {
    let o = model.objectives.get(objective)?;
    let series = store.series(objective);
    let latest = to_f64(series.last()?.value);
    let baseline = match o.magnitude.as_is {
        Some(a) => to_f64(a),
        None if series.len() >= 2 => to_f64(series[0].value),
        None => return None,
    };
    let change = match o.magnitude.direction {
        Direction::Reduction => baseline - latest,
        Direction::Increase => latest - baseline,
    };
    if o.scale.is_percent() {
        if baseline == 0.0 {
            return None;
        }
        Some(change / baseline * 100.0)
    } else {
        Some(change)
    }
}

/// Predicted against measured deltas for every objective.
pub fn variance_report(model: &GoalModel, store: &MeasurementStore, result: &EvaluationResult) -> Vec<VarianceRow> {
    objective_ids(model)
        .into_iter()
        .map(|id| {
            let o = &model.objectives[id.as_str()];
            let predicted = result.node(id.as_str()).filter(|n| n.status != Status::Indeterminate).map(|n| n.achieved);
            let actual = actual_delta(model, store, id.as_str());
            let (gap, verdict) = match (predicted, actual) {
                (Some(p), Some(a)) => {
                    let verdict = if a < p - GRADE_TOLERANCE {
                        Verdict::Behind
                    } else if a > o.target() + GRADE_TOLERANCE {
                        Verdict::Exceeded
                    } else {
                        Verdict::OnTrack
                    };
                    (Some(a - p), verdict)
                }
                _ => (None, Verdict::NoData),
            };
            VarianceRow {
                objective: id.clone(),
                predicted,
                actual,
                gap,
                verdict,
                measurements: store.series(id.as_str()).len(),
                timeframe: o.timeframe.clone(),
            }
        })
        .collect()
}
