//! JSON-over-HTTP facade for the what-if workbench.
//!
//! Every request clones the current [`Snapshot`] once at entry and works on
//! it alone, so a concurrent `POST /api/reload` is never half-observed.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::dsl;
use crate::eval::{evaluate_interval, evaluate_trusted, EvalError, Scenario};
use crate::export::{to_dot, to_json_value};
use crate::model::{validate, GoalModel};
use crate::tracking::{variance_report, MeasurementStore};
use crate::whatif::{compare, sweep, ScenarioSet, WhatIfError};

/// Sidecar holding scenarios saved through the API.
pub fn scenarios_path(model: &Path) -> PathBuf {
    sidecar(model, ".scenarios.json")
}

/// Sidecar holding recorded measurements.
pub fn measurements_path(model: &Path) -> PathBuf {
    sidecar(model, ".measurements.ndjson")
}

fn sidecar(model: &Path, suffix: &str) -> PathBuf {
    let mut name = model.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    model.with_file_name(name)
}

/// One immutable model version.
#[derive(Debug)]
pub struct Snapshot {
    pub model: GoalModel,
    /// Scenarios declared in the model file.
    pub scenarios: Vec<Scenario>,
    pub version: u64,
}

impl Snapshot {
    pub fn scenario(&self, name: &str, saved: &[Scenario]) -> Option<Scenario> {
        self.scenarios.iter().chain(saved).find(|s| s.id == name).cloned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadError {
    pub code: String,
    pub messages: Vec<String>,
}

/// Parses and validates a model file.
pub fn load_model(path: &Path) -> Result<(GoalModel, Vec<Scenario>), LoadError> {
    let bytes =
        std::fs::read(path).map_err(|e| LoadError { code: "IO_ERROR".into(), messages: vec![e.to_string()] })?;
    let parsed = dsl::parse_bytes(&bytes).map_err(|errs| LoadError {
        code: errs.first().map(|e| e.code.clone()).unwrap_or_default(),
        messages: errs.iter().map(ToString::to_string).collect(),
    })?;
    let report = validate(&parsed.model);
    if report.has_errors() {
        return Err(LoadError {
            code: report.errors().next().map(|f| f.code.clone()).unwrap_or_default(),
            messages: report.errors().map(|f| format!("{}: {}: {}", f.location, f.code, f.message)).collect(),
        });
    }
    Ok((parsed.model, parsed.scenarios))
}

pub struct AppState {
    model_path: Option<PathBuf>,
    snapshot: RwLock<Option<Arc<Snapshot>>>,
    /// Serialises scenario-file writes and reloads.
    write_gate: tokio::sync::Mutex<()>,
}

impl AppState {
    /// Loads `model_path` when given; a failed load leaves the server up
    /// with no model until a successful reload.
    pub fn new(model_path: Option<PathBuf>) -> Self {
        let snapshot = model_path
            .as_deref()
            .and_then(|p| load_model(p).ok())
            .map(|(model, scenarios)| Arc::new(Snapshot { model, scenarios, version: 1 }));
        AppState { model_path, snapshot: RwLock::new(snapshot), write_gate: tokio::sync::Mutex::new(()) }
    }

    /// Serves an in-memory model; scenario writes and tracking are then
    /// unavailable.
    pub fn from_model(model: GoalModel, scenarios: Vec<Scenario>) -> Self {
        let snapshot = Some(Arc::new(Snapshot { model, scenarios, version: 1 }));
        AppState { model_path: None, snapshot: RwLock::new(snapshot), write_gate: tokio::sync::Mutex::new(()) }
    }

    pub fn current(&self) -> Option<Arc<Snapshot>> {
        self.snapshot.read().map(|g| g.clone()).unwrap_or_else(|p| p.into_inner().clone())
    }

    fn swap(&self, next: Snapshot) {
        let next = Some(Arc::new(next));
        match self.snapshot.write() {
            Ok(mut g) => *g = next,
            Err(p) => *p.into_inner() = next,
        }
    }

    fn saved_scenarios(&self) -> Result<Vec<Scenario>, ApiError> {
        let Some(path) = &self.model_path else { return Ok(Vec::new()) };
        match std::fs::read_to_string(scenarios_path(path)) {
            Ok(text) => crate::export::from_json(&text, "scenarios")
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string())),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_ERROR", e.to_string())),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.to_string(), message: message.into(), detail: Value::Null }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    fn no_model() -> Self {
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "NO_MODEL", "no model is loaded")
    }
}

impl From<EvalError> for ApiError {
    fn from(e: EvalError) -> Self {
        let status = match e {
            EvalError::InvalidScenario(_) => StatusCode::BAD_REQUEST,
            EvalError::InvalidModel(_) | EvalError::Domain { .. } => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let detail = match &e {
            EvalError::InvalidScenario(problems) => json!(problems),
            EvalError::InvalidModel(findings) => json!(findings),
            EvalError::Domain { link, source } => json!({ "link": link, "reason": source.to_string() }),
        };
        ApiError::new(status, e.code(), e.to_string()).with_detail(detail)
    }
}

impl From<WhatIfError> for ApiError {
    fn from(e: WhatIfError) -> Self {
        match e {
            WhatIfError::Eval(inner) => inner.into(),
            WhatIfError::DuplicateScenario(_) => ApiError::new(StatusCode::CONFLICT, e.code(), e.to_string()),
            _ => ApiError::new(StatusCode::BAD_REQUEST, e.code(), e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body =
            to_json_value("error", &json!({ "code": self.code, "message": self.message, "detail": self.detail }));
        (self.status, axum::Json(body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn ok<T: Serialize + ?Sized>(kind: &str, data: &T) -> ApiResult {
    Ok(axum::Json(to_json_value(kind, data)).into_response())
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_BODY", e.to_string()))
}

fn snapshot(state: &AppState) -> Result<Arc<Snapshot>, ApiError> {
    state.current().ok_or_else(ApiError::no_model)
}

async fn health(State(state): State<Arc<AppState>>) -> ApiResult {
    let snap = state.current();
    ok("health", &json!({ "status": "ok", "model_loaded": snap.is_some(), "version": snap.map(|s| s.version) }))
}

async fn get_model(State(state): State<Arc<AppState>>) -> ApiResult {
    let snap = snapshot(&state)?;
    ok("model", &snap.model)
}

#[derive(Deserialize, Default)]
struct EvalQuery {
    #[serde(default)]
    intervals: bool,
}

async fn post_evaluate(State(state): State<Arc<AppState>>, Query(q): Query<EvalQuery>, bytes: Bytes) -> ApiResult {
    let snap = snapshot(&state)?;
    let scenario: Scenario = body(&bytes)?;
    let result = if q.intervals {
        evaluate_interval(&snap.model, &scenario)?
    } else {
        evaluate_trusted(&snap.model, &scenario)?
    };
    ok("evaluation", &result)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRequest {
    #[serde(default)]
    scenario: Scenario,
    node: String,
    from: f64,
    to: f64,
    steps: usize,
}

async fn post_sweep(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let snap = snapshot(&state)?;
    let req: SweepRequest = body(&bytes)?;
    let result = sweep(&snap.model, &req.scenario, &req.node, req.from, req.to, req.steps)?;
    ok("sweep", &result)
}

async fn post_compare(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let snap = snapshot(&state)?;
    let set: ScenarioSet = body(&bytes)?;
    let table = compare(&snap.model, &set)?;
    ok("comparison", &table)
}

#[derive(Deserialize, Default)]
struct ScenarioQuery {
    scenario: Option<String>,
}

fn named_scenario(state: &AppState, snap: &Snapshot, name: &str) -> Result<Scenario, ApiError> {
    let saved = state.saved_scenarios()?;
    snap.scenario(name, &saved).ok_or_else(|| {
        ApiError::new(StatusCode::BAD_REQUEST, "UNKNOWN_SCENARIO", format!("no scenario named '{name}'"))
    })
}

async fn get_dot(State(state): State<Arc<AppState>>, Query(q): Query<ScenarioQuery>) -> ApiResult {
    let snap = snapshot(&state)?;
    let result = match q.scenario.as_deref().filter(|s| !s.is_empty()) {
        Some(name) => Some(evaluate_trusted(&snap.model, &named_scenario(&state, &snap, name)?)?),
        None => None,
    };
    ok("dot", &json!({ "scenario": q.scenario, "dot": to_dot(&snap.model, result.as_ref()) }))
}

async fn get_scenarios(State(state): State<Arc<AppState>>) -> ApiResult {
    let snap = snapshot(&state)?;
    let saved = state.saved_scenarios()?;
    ok("scenarios", &json!({ "model": snap.scenarios, "saved": saved }))
}

async fn put_scenarios(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let snap = snapshot(&state)?;
    let Some(path) = state.model_path.clone() else {
        return Err(ApiError::new(StatusCode::CONFLICT, "NO_MODEL_FILE", "model was not loaded from a file"));
    };
    let scenarios: Vec<Scenario> = body(&bytes)?;
    let mut names = std::collections::BTreeSet::new();
    for s in &scenarios {
        if !names.insert(s.id.as_str()) {
            return Err(ApiError::new(StatusCode::CONFLICT, "DUPLICATE_SCENARIO", format!("'{}' appears twice", s.id)));
        }
        if snap.scenarios.iter().any(|m| m.id == s.id) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "DUPLICATE_SCENARIO",
                format!("'{}' is already declared in the model file", s.id),
            ));
        }
        let problems = s.check(&snap.model);
        if !problems.is_empty() {
            return Err(EvalError::InvalidScenario(problems).into());
        }
    }
    let _gate = state.write_gate.lock().await;
    write_atomic(&scenarios_path(&path), crate::export::to_json("scenarios", &scenarios).as_bytes())
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_ERROR", e.to_string()))?;
    ok("scenarios", &json!({ "model": snap.scenarios, "saved": scenarios }))
}

/// Replaces `path` by writing a temporary file beside it and renaming.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

async fn get_tracking(State(state): State<Arc<AppState>>, Query(q): Query<ScenarioQuery>) -> ApiResult {
    let snap = snapshot(&state)?;
    let store = match &state.model_path {
        Some(p) => MeasurementStore::load(&measurements_path(p))
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string()))?,
        None => MeasurementStore::new(),
    };
    let scenario = match q.scenario.as_deref().filter(|s| !s.is_empty()) {
        Some(name) => named_scenario(&state, &snap, name)?,
        None => Scenario::all_satisfied(&snap.model),
    };
    let result = evaluate_trusted(&snap.model, &scenario)?;
    let report = variance_report(&snap.model, &store, &result);
    ok("tracking", &json!({ "scenario": scenario.id, "measurements": store.measurements(), "variance": report }))
}

async fn post_reload(State(state): State<Arc<AppState>>) -> ApiResult {
    let Some(path) = state.model_path.clone() else {
        return Err(ApiError::new(StatusCode::CONFLICT, "NO_MODEL_FILE", "model was not loaded from a file"));
    };
    let _gate = state.write_gate.lock().await;
    match load_model(&path) {
        Ok((model, scenarios)) => {
            let version = state.current().map(|s| s.version + 1).unwrap_or(1);
            state.swap(Snapshot { model, scenarios, version });
            ok("health", &json!({ "status": "ok", "model_loaded": true, "version": version }))
        }
        Err(e) => {
            Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, &e.code, "model failed to load; previous version kept")
                .with_detail(json!(e.messages)))
        }
    }
}

/// The API router, optionally serving static files from `static_dir` at `/`.
pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/model", get(get_model))
        .route("/api/evaluate", post(post_evaluate))
        .route("/api/sweep", post(post_sweep))
        .route("/api/compare", post(post_compare))
        .route("/api/export/dot", get(get_dot))
        .route("/api/scenarios", get(get_scenarios).put(put_scenarios))
        .route("/api/tracking", get(get_tracking))
        .route("/api/reload", post(post_reload))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds and serves until the process ends.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state, static_dir.as_deref())).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecars_sit_beside_the_model() {
        let p = Path::new("/data/plant.goal");
        assert_eq!(scenarios_path(p), Path::new("/data/plant.goal.scenarios.json"));
        assert_eq!(measurements_path(p), Path::new("/data/plant.goal.measurements.ndjson"));
        assert_eq!(scenarios_path(Path::new("m.goal")), Path::new("m.goal.scenarios.json"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn load_errors_name_the_first_code() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.goal");
        std::fs::write(&path, "objective {").unwrap();
        assert!(load_model(&path).unwrap_err().code.starts_with("PARSE_"));
        assert_eq!(load_model(&dir.path().join("none.goal")).unwrap_err().code, "IO_ERROR");
    }
}
