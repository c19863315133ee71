//! Command-line front end. [`run`] does all the work so that tests can drive
//! it in-process; the binary only forwards arguments and the exit code.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rust_decimal::Decimal;
use serde_json::json;

use crate::dsl::{self, Parsed};
use crate::eval::{self, EvaluationResult, OrPolicy, Scenario, CHAIN_CONFIDENCE_NOTE};
use crate::export::{self, to_json};
use crate::library;
use crate::model::{validate, GoalModel, Quantification, Severity};
use crate::server::{self, measurements_path, scenarios_path, AppState};
use crate::tracking::{self, Measurement, MeasurementStore};
use crate::whatif::{self, ScenarioSet, DEFAULT_DROP_FRACTION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "goalgraph", version, about = "Quantified goal graphs for requirements alignment")]
pub struct Cli {
    /// Print canonical JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a model.
    Validate { file: PathBuf },
    /// Evaluate a model under a scenario.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        opts: EvalOpts,
        /// Also propagate interval estimates.
        #[arg(long)]
        intervals: bool,
    },
    /// Compare scenarios against the first one.
    Compare {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        scenarios: Vec<String>,
    },
    /// Evaluate at evenly spaced levels of one node.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        node: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        opts: EvalOpts,
    },
    /// Write a Graphviz diagram.
    Render {
        file: PathBuf,
        /// Colour nodes by the evaluation of the chosen scenario.
        #[arg(long)]
        result: bool,
        #[command(flatten)]
        opts: EvalOpts,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Tabulate link contributions and objective statuses.
    Report {
        file: PathBuf,
        #[command(flatten)]
        opts: EvalOpts,
        #[arg(long)]
        csv: bool,
    },
    /// List every contribution path from a requirement to the roots.
    Chain {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[command(flatten)]
        opts: EvalOpts,
    },
    /// Find where a link's table function starts to flatten.
    Knee {
        file: PathBuf,
        #[arg(long)]
        link: String,
        #[arg(long, default_value_t = DEFAULT_DROP_FRACTION)]
        drop: f64,
    },
    /// Record measurements and compare them with predictions.
    Track {
        #[command(subcommand)]
        action: TrackAction,
    },
    /// Serve the JSON API (and optionally static files).
    Serve {
        file: PathBuf,
        #[arg(long, env = "GOALGRAPH_PORT", default_value_t = 7878)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Directory of static files served at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
    /// Search a directory of past project models.
    Library {
        #[command(subcommand)]
        action: LibraryAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum TrackAction {
    /// Append one measurement.
    Record {
        file: PathBuf,
        #[arg(long)]
        objective: String,
        #[arg(long, allow_negative_numbers = true)]
        value: Decimal,
        /// UTC timestamp, e.g. 2026-01-31T00:00:00Z.
        #[arg(long)]
        at: String,
        /// Measurement file; defaults to `<file>.measurements.ndjson`.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Predicted against measured change per objective.
    Report {
        file: PathBuf,
        #[command(flatten)]
        opts: EvalOpts,
        #[arg(long)]
        store: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum LibraryAction {
    Search {
        term: String,
        #[arg(long, default_value = "library")]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrArg {
    Require,
    Best,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EvalOpts {
    /// Scenario declared in the file or saved beside it. Without one, every
    /// requirement counts as fully satisfied.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub no_confidence: bool,
    #[arg(long = "or", value_enum)]
    pub or: Option<OrArg>,
    /// Prorate single-point links by partial source satisfaction.
    #[arg(long)]
    pub proration: bool,
}

/// A failure that ends the command with a diagnostic and an exit code.
struct Failure {
    exit: i32,
    code: String,
    /// Diagnostic lines, each with its own code.
    lines: Vec<(String, String)>,
}

/// Drops a leading `CODE: ` that error displays carry.
fn without_code(code: &str, msg: String) -> String {
    match msg.strip_prefix(code).and_then(|rest| rest.strip_prefix(": ")) {
        Some(rest) => rest.to_string(),
        None => msg,
    }
}

impl Failure {
    fn new(exit: i32, code: &str, msg: impl Into<String>) -> Self {
        Failure { exit, code: code.into(), lines: vec![(code.into(), without_code(code, msg.into()))] }
    }

    fn usage(code: &str, msg: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, code, msg)
    }

    fn error(code: &str, msg: impl Into<String>) -> Self {
        Self::new(EXIT_FAILURE, code, msg)
    }
}

impl From<eval::EvalError> for Failure {
    fn from(e: eval::EvalError) -> Self {
        let code = e.code().to_string();
        let lines = match &e {
            eval::EvalError::InvalidModel(findings) => {
                findings.iter().map(|f| (f.code.clone(), format!("{}: {}", f.location, f.message))).collect()
            }
            eval::EvalError::InvalidScenario(problems) => problems.iter().map(|p| (code.clone(), p.clone())).collect(),
            eval::EvalError::Domain { .. } => vec![(code.clone(), without_code(&code, e.to_string()))],
        };
        Failure { exit: EXIT_FAILURE, code, lines }
    }
}

impl From<whatif::WhatIfError> for Failure {
    fn from(e: whatif::WhatIfError) -> Self {
        match e {
            whatif::WhatIfError::Eval(inner) => inner.into(),
            whatif::WhatIfError::UnknownNode(_) | whatif::WhatIfError::BadRange(_) => {
                Failure::usage(e.code(), e.to_string())
            }
            _ => Failure::error(e.code(), e.to_string()),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn read_model(path: &Path) -> Result<Parsed, Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| Failure::usage("IO_ERROR", format!("cannot read {}: {e}", path.display())))?;
    dsl::parse_bytes(&bytes).map_err(|errs| Failure {
        exit: EXIT_FAILURE,
        code: errs.first().map(|e| e.code.clone()).unwrap_or_default(),
        lines: errs
            .iter()
            .map(|e| (e.code.clone(), format!("{}:{}: {}", path.display(), e.span, e.message())))
            .collect(),
    })
}

fn read_valid_model(path: &Path) -> Result<Parsed, Failure> {
    let parsed = read_model(path)?;
    let report = validate(&parsed.model);
    if report.has_errors() {
        return Err(eval::EvalError::InvalidModel(report.errors().cloned().collect()).into());
    }
    Ok(parsed)
}

fn saved_scenarios(path: &Path) -> Result<Vec<Scenario>, Failure> {
    match std::fs::read_to_string(scenarios_path(path)) {
        Ok(text) => export::from_json(&text, "scenarios").map_err(|e| Failure::error(e.code(), e.to_string())),
        Err(_) => Ok(Vec::new()),
    }
}

fn find_scenario(parsed: &Parsed, path: &Path, name: &str) -> Result<Scenario, Failure> {
    if let Some(s) = parsed.scenarios.iter().find(|s| s.id == name) {
        return Ok(s.clone());
    }
    saved_scenarios(path)?
        .into_iter()
        .find(|s| s.id == name)
        .ok_or_else(|| Failure::usage("UNKNOWN_SCENARIO", format!("no scenario named '{name}'")))
}

fn build_scenario(parsed: &Parsed, path: &Path, opts: &EvalOpts) -> Result<Scenario, Failure> {
    let mut s = match &opts.scenario {
        Some(name) => find_scenario(parsed, path, name)?,
        None => Scenario::all_satisfied(&parsed.model),
    };
    if opts.no_confidence {
        s.options.confidence_adjust = false;
    }
    if let Some(or) = opts.or {
        s.options.or_policy = match or {
            OrArg::Require => OrPolicy::Require,
            OrArg::Best => OrPolicy::Best,
        };
    }
    if opts.proration {
        s.options.single_point_proration = true;
    }
    Ok(s)
}

fn num(v: f64) -> String {
    format!("{:.4}", v + 0.0)
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "-".into())
}

/// Left-aligned text table.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn objective_rows(model: &GoalModel, result: &EvaluationResult) -> Vec<Vec<String>> {
    whatif::objective_ids(model)
        .into_iter()
        .map(|id| {
            let o = &model.objectives[id.as_str()];
            let n = &result.nodes[id.as_str()];
            let mut row = vec![
                id.to_string(),
                num(n.achieved),
                o.magnitude.threshold.normalize().to_string(),
                o.magnitude.target.normalize().to_string(),
                o.scale.unit.clone(),
                n.status.as_str().to_string(),
            ];
            if let Some(iv) = result.interval_results.as_ref().and_then(|m| m.get(id.as_str())) {
                row.push(num(iv.lo));
                row.push(num(iv.hi));
                row.push(format!("{}/{}", iv.pessimistic.as_str(), iv.optimistic.as_str()));
            }
            row
        })
        .collect()
}

fn eval_text(model: &GoalModel, result: &EvaluationResult) -> String {
    let mut out = format!(
        "scenario {} (confidence adjustment {})\n",
        result.scenario,
        if result.confidence_adjusted { "on" } else { "off" }
    );
    let mut header = vec!["objective", "achieved", "threshold", "target", "unit", "status"];
    if result.interval_results.is_some() {
        header.extend(["lo", "hi", "pessimistic/optimistic"]);
    }
    out.push_str(&table(&header, &objective_rows(model, result)));
    if !result.root_utilities.is_empty() {
        out.push_str("root utilities:");
        for (id, u) in &result.root_utilities {
            let _ = write!(out, " {id}={}", num(*u));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "total utility: {}", result.total_utility.map(num).unwrap_or_else(|| "indeterminate".into()));
    for f in &result.audit_flags {
        let _ = writeln!(out, "flag {} at {}: {}", f.code, f.location, f.message);
    }
    if let Some(note) = &result.note {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn cmd_validate(cli: &Cli, file: &Path) -> Result<(String, i32), Failure> {
    let parsed = read_model(file)?;
    let report = validate(&parsed.model);
    let exit = if report.has_errors() { EXIT_FAILURE } else { EXIT_OK };
    if cli.json {
        return Ok((to_json("validation", &report), exit));
    }
    let mut out = String::new();
    for f in &report.findings {
        let sev = if f.severity == Severity::Error { "error" } else { "warning" };
        let _ = writeln!(out, "{sev} {} at {}: {}", f.code, f.location, f.message);
    }
    let _ = writeln!(
        out,
        "{}: {} error(s), {} warning(s); {} objective(s), {} requirement(s), {} link(s)",
        file.display(),
        report.errors().count(),
        report.warnings().count(),
        parsed.model.objectives.len(),
        parsed.model.requirements.len(),
        parsed.model.contributions.len()
    );
    Ok((out, exit))
}

fn cmd_eval(cli: &Cli, file: &Path, opts: &EvalOpts, intervals: bool) -> CmdResult {
    let parsed = read_valid_model(file)?;
    let scenario = build_scenario(&parsed, file, opts)?;
    let result = if intervals {
        eval::evaluate_interval(&parsed.model, &scenario)?
    } else {
        eval::evaluate_trusted(&parsed.model, &scenario)?
    };
    if cli.json {
        return Ok(to_json("evaluation", &result));
    }
    Ok(eval_text(&parsed.model, &result))
}

fn cmd_compare(cli: &Cli, file: &Path, names: &[String]) -> CmdResult {
    let parsed = read_valid_model(file)?;
    let scenarios = names.iter().map(|n| find_scenario(&parsed, file, n)).collect::<Result<Vec<_>, _>>()?;
    let set = ScenarioSet::new(scenarios, names[0].clone()).map_err(|e| Failure::usage(e.code(), e.to_string()))?;
    let t = whatif::compare(&parsed.model, &set)?;
    if cli.json {
        return Ok(to_json("comparison", &t));
    }
    let mut header = vec!["node".to_string()];
    for c in &t.columns {
        header.push(c.clone());
        if *c != t.baseline {
            header.push(format!("Δ {c}"));
        }
    }
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![if r.root { format!("{} (root)", r.node) } else { r.node.clone() }];
            for (c, cell) in t.columns.iter().zip(&r.cells) {
                let value = match (cell.achieved, cell.status) {
                    (Some(a), Some(s)) => format!("{} {}", num(a), s.as_str()),
                    (None, Some(s)) => s.as_str().to_string(),
                    (a, None) => opt_num(a),
                };
                row.push(value);
                if *c != t.baseline {
                    row.push(cell.delta.map(|d| format!("{:+.4}", d + 0.0)).unwrap_or_else(|| "-".into()));
                }
            }
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = format!("baseline {}\n", t.baseline);
    out.push_str(&table(&header, &rows));
    for (c, e) in &t.errors {
        let _ = writeln!(out, "error in {c}: {e}");
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(cli: &Cli, file: &Path, node: &str, from: f64, to: f64, steps: usize, opts: &EvalOpts) -> CmdResult {
    let parsed = read_valid_model(file)?;
    let scenario = build_scenario(&parsed, file, opts)?;
    let r = whatif::sweep(&parsed.model, &scenario, node, from, to, steps)?;
    if cli.json {
        return Ok(to_json("sweep", &r));
    }
    let ids = whatif::objective_ids(&parsed.model);
    let mut header = vec!["input".to_string()];
    header.extend(ids.iter().filter(|id| id.as_str() != node).map(|id| id.to_string()));
    header.push("utility".into());
    let rows: Vec<Vec<String>> = r
        .samples
        .iter()
        .map(|s| {
            let mut row = vec![num(s.input)];
            for id in ids.iter().filter(|id| id.as_str() != node) {
                row.push(num(s.achieved[id.as_str()]));
            }
            row.push(opt_num(s.total_utility));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(format!("sweep of {node}\n{}", table(&header, &rows)))
}

fn cmd_render(cli: &Cli, file: &Path, with_result: bool, opts: &EvalOpts, output: Option<&Path>) -> CmdResult {
    let parsed = read_valid_model(file)?;
    let result = if with_result || opts.scenario.is_some() {
        let scenario = build_scenario(&parsed, file, opts)?;
        Some(eval::evaluate_trusted(&parsed.model, &scenario)?)
    } else {
        None
    };
    let dot = export::to_dot(&parsed.model, result.as_ref());
    match output {
        Some(path) => {
            std::fs::write(path, &dot)
                .map_err(|e| Failure::usage("IO_ERROR", format!("cannot write {}: {e}", path.display())))?;
            if cli.json {
                Ok(to_json("dot", &json!({ "path": path.display().to_string(), "dot": dot })))
            } else {
                Ok(format!("wrote {}\n", path.display()))
            }
        }
        None if cli.json => Ok(to_json("dot", &json!({ "path": null, "dot": dot }))),
        None => Ok(dot),
    }
}

fn cmd_report(cli: &Cli, file: &Path, opts: &EvalOpts, csv: bool) -> CmdResult {
    let parsed = read_valid_model(file)?;
    let scenario = build_scenario(&parsed, file, opts)?;
    let result = eval::evaluate_trusted(&parsed.model, &scenario)?;
    if cli.json {
        return Ok(to_json("report", &export::report(&parsed.model, &result)));
    }
    Ok(if csv { export::report_csv(&parsed.model, &result) } else { export::report_markdown(&parsed.model, &result) })
}

fn cmd_chain(cli: &Cli, file: &Path, from: &str, opts: &EvalOpts) -> CmdResult {
    let parsed = read_valid_model(file)?;
    if !parsed.model.requirements.contains_key(from) {
        return Err(Failure::usage("UNKNOWN_NODE", format!("'{from}' is not a requirement")));
    }
    let scenario = build_scenario(&parsed, file, opts)?;
    let result = eval::evaluate_trusted(&parsed.model, &scenario)?;
    let chains = eval::summarize_chain(&parsed.model, &result, from);
    if cli.json {
        return Ok(to_json("chains", &json!({ "from": from, "chains": chains, "note": CHAIN_CONFIDENCE_NOTE })));
    }
    let mut out = String::new();
    for c in &chains {
        let path: Vec<&str> = c.path.iter().map(|id| id.as_str()).collect();
        let _ = writeln!(out, "{}  path confidence {}", path.join(" -> "), num(c.path_confidence));
        for h in &c.hops {
            let _ = writeln!(
                out,
                "  {} {} -> {}: raw {} adjusted {} @{} (cumulative {})",
                h.link,
                h.from,
                h.to,
                opt_num(h.raw),
                opt_num(h.adjusted),
                num(h.confidence),
                num(h.cumulative_confidence)
            );
        }
    }
    if chains.is_empty() {
        let _ = writeln!(out, "no contribution paths from {from}");
    }
    let _ = writeln!(out, "note: {CHAIN_CONFIDENCE_NOTE}");
    Ok(out)
}

fn cmd_knee(cli: &Cli, file: &Path, link: &str, drop: f64) -> CmdResult {
    let parsed = read_valid_model(file)?;
    let l = parsed
        .model
        .contributions
        .get(link)
        .ok_or_else(|| Failure::usage("UNKNOWN_LINK", format!("no link named '{link}'")))?;
    let Quantification::Multi { function } = &l.quantification else {
        return Err(Failure::usage("NOT_A_FUNCTION", format!("link '{link}' has a single-point estimate")));
    };
    let knee = whatif::diminishing_returns(function, drop).map_err(|e| match e {
        whatif::WhatIfError::BadRange(_) => Failure::usage(e.code(), e.to_string()),
        _ => Failure::error(e.code(), e.to_string()),
    })?;
    if cli.json {
        let knee = knee.map(|(x, y)| json!({ "x": x, "y": y }));
        return Ok(to_json("knee", &json!({ "link": link, "drop_fraction": drop, "knee": knee })));
    }
    Ok(match knee {
        Some((x, y)) => format!("{link}: diminishing returns from x = {} (y = {})\n", num(x), num(y)),
        None => format!("{link}: no diminishing returns at drop fraction {drop}\n"),
    })
}

fn cmd_track(cli: &Cli, action: &TrackAction) -> CmdResult {
    match action {
        TrackAction::Record { file, objective, value, at, store } => {
            let parsed = read_valid_model(file)?;
            let m = Measurement::new(objective.as_str(), at, *value).map_err(|e| Failure::usage("BAD_TIMESTAMP", e))?;
            let path = store.clone().unwrap_or_else(|| measurements_path(file));
            let store = tracking::append(&path, &parsed.model, m.clone())
                .map_err(|e| Failure::error(e.code(), e.to_string()))?;
            let n = store.series(objective).len();
            if cli.json {
                return Ok(to_json("measurement", &json!({ "recorded": m, "series_length": n })));
            }
            Ok(format!("recorded {objective} = {} at {at} ({n} measurement(s))\n", value.normalize()))
        }
        TrackAction::Report { file, opts, store } => {
            let parsed = read_valid_model(file)?;
            let scenario = build_scenario(&parsed, file, opts)?;
            let result = eval::evaluate_trusted(&parsed.model, &scenario)?;
            let path = store.clone().unwrap_or_else(|| measurements_path(file));
            let store = MeasurementStore::load(&path).map_err(|e| Failure::error(e.code(), e.to_string()))?;
            let rows = tracking::variance_report(&parsed.model, &store, &result);
            if cli.json {
                return Ok(to_json("variance", &rows));
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.objective.to_string(),
                        opt_num(r.predicted),
                        opt_num(r.actual),
                        r.gap.map(|g| format!("{:+.4}", g + 0.0)).unwrap_or_else(|| "-".into()),
                        r.verdict.as_str().to_string(),
                        r.measurements.to_string(),
                        r.timeframe.clone(),
                    ]
                })
                .collect();
            Ok(format!(
                "scenario {}\n{}",
                result.scenario,
                table(&["objective", "predicted", "actual", "gap", "verdict", "measurements", "timeframe"], &body)
            ))
        }
    }
}

fn cmd_serve(file: &Path, port: u16, bind: &str, static_dir: Option<&Path>, stderr: &mut dyn Write) -> CmdResult {
    let addr: std::net::SocketAddr = format!("{bind}:{port}")
        .parse()
        .map_err(|e| Failure::usage("BAD_ADDRESS", format!("bad bind address '{bind}:{port}': {e}")))?;
    if let Err(e) = server::load_model(file) {
        let lines = e.messages.into_iter().map(|m| (e.code.clone(), m)).collect();
        return Err(Failure { exit: EXIT_FAILURE, code: e.code, lines });
    }
    let state = std::sync::Arc::new(AppState::new(Some(file.to_path_buf())));
    let _ = writeln!(stderr, "serving {} on http://{addr}", file.display());
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::error("IO_ERROR", e.to_string()))?;
    runtime
        .block_on(server::serve(state, addr, static_dir.map(Path::to_path_buf)))
        .map_err(|e| Failure::error("IO_ERROR", e.to_string()))?;
    Ok(String::new())
}

fn cmd_library(cli: &Cli, action: &LibraryAction, stderr: &mut dyn Write) -> CmdResult {
    let LibraryAction::Search { term, dir } = action;
    let found = library::search(dir, term)
        .map_err(|e| Failure::usage("IO_ERROR", format!("cannot read {}: {e}", dir.display())))?;
    if cli.json {
        return Ok(to_json("library", &found));
    }
    let rows: Vec<Vec<String>> = found
        .hits
        .iter()
        .map(|h| {
            let conf = match &h.confidence_label {
                Some(l) => format!("{} ({l})", num(h.confidence)),
                None => num(h.confidence),
            };
            vec![h.file.clone(), h.link.to_string(), h.contribution.clone(), conf, h.description.clone()]
        })
        .collect();
    for (file, why) in &found.skipped {
        let _ = writeln!(stderr, "warning: skipped {file}: {why}");
    }
    Ok(table(&["file", "link", "contribution", "confidence", "description"], &rows))
}

fn dispatch(cli: &Cli, stderr: &mut dyn Write) -> Result<(String, i32), Failure> {
    let ok = |r: CmdResult| r.map(|s| (s, EXIT_OK));
    match &cli.command {
        Command::Validate { file } => cmd_validate(cli, file),
        Command::Eval { file, opts, intervals } => ok(cmd_eval(cli, file, opts, *intervals)),
        Command::Compare { file, scenarios } => ok(cmd_compare(cli, file, scenarios)),
        Command::Sweep { file, node, from, to, steps, opts } => {
            ok(cmd_sweep(cli, file, node, *from, *to, *steps, opts))
        }
        Command::Render { file, result, opts, output } => ok(cmd_render(cli, file, *result, opts, output.as_deref())),
        Command::Report { file, opts, csv } => ok(cmd_report(cli, file, opts, *csv)),
        Command::Chain { file, from, opts } => ok(cmd_chain(cli, file, from, opts)),
        Command::Knee { file, link, drop } => ok(cmd_knee(cli, file, link, *drop)),
        Command::Track { action } => ok(cmd_track(cli, action)),
        Command::Serve { file, port, bind, static_dir } => {
            ok(cmd_serve(file, *port, bind, static_dir.as_deref(), stderr))
        }
        Command::Library { action } => ok(cmd_library(cli, action, stderr)),
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit code. Machine output goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    if args.iter().skip(1).any(|a| a == "--json") {
                        let head = text.split("\n\n").next().unwrap_or_default();
                        let head = head.strip_prefix("error: ").unwrap_or(head);
                        let message = head.split_whitespace().collect::<Vec<_>>().join(" ");
                        let messages = [json!({ "code": "USAGE", "message": message })];
                        let body = json!({ "code": "USAGE", "messages": messages });
                        let _ = stdout.write_all(to_json("error", &body).as_bytes());
                    }
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, stderr) {
        Ok((out, code)) => {
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(f) => {
            if cli.json {
                let messages: Vec<_> =
                    f.lines.iter().map(|(code, message)| json!({ "code": code, "message": message })).collect();
                let body = json!({ "code": f.code, "messages": messages });
                let _ = stdout.write_all(to_json("error", &body).as_bytes());
            }
            for (code, line) in &f.lines {
                let _ = writeln!(stderr, "error[{code}]: {line}");
            }
            f.exit
        }
    }
}
