//! What-if HTTP service over one loaded instance.
//!
//! Workforce overrides are per request and never touch the stored instance.
//! Responses that depend on the instance carry its checksum in the
//! `x-instance-checksum` header; a request may pin the checksum it expects
//! (`checksum` body field or `if-match` header) and gets 409 if the instance
//! has since been replaced.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lru::LruCache;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use skillsched_core::exact::{estimated_search_size, exact_solve_with, ExactError, Proof, SearchControl};
use skillsched_core::model::{headcount_profile, objective, ModelError};
use skillsched_core::scenario::{workforce_bounds, ALPHA_GRID};
use skillsched_core::{
    edm_solve, CapacityMode, EdmConfig, Instance, OrderingRule, RawInstance, SearchLimits, SearchMode,
};

use crate::format::{checksum, instance_from_raw, traces, FormatError, ScheduleExport, TraceExport};
use crate::report::{parallel_sweep, SweepReport, WallClock};

pub const CHECKSUM_HEADER: &str = "x-instance-checksum";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Largest unpruned search-tree size accepted by `/api/exact`.
    pub exact_guard: f64,
    pub exact_max_nodes: u64,
    pub exact_max_time: Duration,
    pub cache_entries: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            exact_guard: 1e9,
            exact_max_nodes: 5_000_000,
            exact_max_time: Duration::from_secs(20),
            cache_entries: 256,
        }
    }
}

pub struct Session {
    pub instance: Instance,
    pub checksum: String,
}

type CacheKey = (String, Vec<u32>, EdmConfig);

struct Shared {
    session: RwLock<Option<Arc<Session>>>,
    cache: Mutex<LruCache<CacheKey, Arc<SolveCore>>>,
    config: ServiceConfig,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        let entries = NonZeroUsize::new(config.cache_entries.max(1)).expect("nonzero");
        AppState(Arc::new(Shared {
            session: RwLock::new(None),
            cache: Mutex::new(LruCache::new(entries)),
            config,
        }))
    }

    pub fn with_instance(config: ServiceConfig, instance: Instance) -> Self {
        let state = Self::new(config);
        state.replace(instance);
        state
    }

    /// Swaps in a new instance. In-flight requests keep the old one.
    pub fn replace(&self, instance: Instance) -> Arc<Session> {
        let session = Arc::new(Session {
            checksum: checksum(&instance),
            instance,
        });
        *self.0.session.write().expect("session lock") = Some(session.clone());
        self.0.cache.lock().expect("cache lock").clear();
        session
    }

    fn current(&self) -> Result<Arc<Session>, ApiError> {
        self.0
            .session
            .read()
            .expect("session lock")
            .clone()
            .ok_or(ApiError::NoInstance)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/instance", get(get_instance).put(put_instance))
        .route("/api/solve", post(solve))
        .route("/api/exact", post(exact))
        .route("/api/sweep", post(sweep))
        .with_state(state)
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NoInstance,
    Stale { expected: String, current: String },
    Unprocessable { error: String, details: Vec<String> },
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::BadRequest(msg) => (StatusCode::BAD_REQUEST, json!({ "error": msg })),
            ApiError::NoInstance => (StatusCode::NOT_FOUND, json!({ "error": "no instance loaded" })),
            ApiError::Stale { expected, current } => (
                StatusCode::CONFLICT,
                json!({ "error": "instance was replaced", "expected": expected, "current": current }),
            ),
            ApiError::Unprocessable { error, details } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "error": error, "details": details }),
            ),
        };
        (status, Json(body)).into_response()
    }
}

fn invalid(errors: &[ModelError]) -> ApiError {
    ApiError::Unprocessable {
        error: "validation failed".into(),
        details: errors.iter().map(ToString::to_string).collect(),
    }
}

/// Empty bodies read as the default request.
fn parse_body<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

fn with_checksum(session: &Session, body: Value) -> Response {
    let mut resp = Json(body).into_response();
    resp.headers_mut().insert(
        CHECKSUM_HEADER,
        HeaderValue::from_str(&session.checksum).expect("hex is a valid header"),
    );
    resp
}

fn check_pin(session: &Session, headers: &HeaderMap, body_pin: Option<&str>) -> Result<(), ApiError> {
    let header_pin = headers
        .get("if-match")
        .and_then(|v| v.to_str().ok())
        .map(|s| s.trim_matches('"'));
    for pin in [header_pin, body_pin].into_iter().flatten() {
        if pin != session.checksum {
            return Err(ApiError::Stale {
                expected: pin.to_string(),
                current: session.checksum.clone(),
            });
        }
    }
    Ok(())
}

async fn health() -> Json<Value> {
    Json(json!({
        "status": "ok",
        "service": "skillsched-whatif",
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

fn bounds_json(inst: &Instance) -> Value {
    let b = workforce_bounds(inst);
    json!({
        "w_min": b.w_min,
        "w_max": b.w_max,
        "per_skill_min": b.per_skill_min,
        "per_skill_max": b.per_skill_max,
    })
}

async fn get_instance(State(state): State<AppState>) -> Result<Response, ApiError> {
    let s = state.current()?;
    Ok(with_checksum(
        &s,
        json!({
            "checksum": s.checksum,
            "instance": s.instance.to_raw(),
            "bounds": bounds_json(&s.instance),
            "warnings": s.instance.warnings(),
        }),
    ))
}

async fn put_instance(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let raw: RawInstance = serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let inst = match instance_from_raw(&raw) {
        Ok(i) => i,
        Err(FormatError::Invalid(errors)) => return Err(invalid(&errors)),
        Err(e) => return Err(ApiError::BadRequest(e.to_string())),
    };
    let s = state.replace(inst);
    let ops = s.instance.op_count().total;
    Ok(with_checksum(
        &s,
        json!({
            "checksum": s.checksum,
            "jobs": s.instance.num_jobs(),
            "skills": s.instance.num_skills(),
            "operations": ops,
            "warnings": s.instance.warnings(),
            "bounds": bounds_json(&s.instance),
        }),
    ))
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OrderingName {
    #[default]
    Workload,
    Time,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CapacityName {
    #[default]
    Gated,
    Literal,
}

/// Either one headcount per skill in instance order, or a partial map from
/// skill id to headcount.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Workforce {
    List(Vec<u32>),
    Map(BTreeMap<String, u32>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveRequest {
    workforce: Option<Workforce>,
    #[serde(default)]
    ordering: OrderingName,
    #[serde(default)]
    capacity_mode: CapacityName,
    #[serde(default)]
    allow_overflow: bool,
    #[serde(default)]
    trace: bool,
    checksum: Option<String>,
}

fn edm_config(ordering: OrderingName, capacity: CapacityName, allow_overflow: bool) -> EdmConfig {
    EdmConfig {
        ordering: match ordering {
            OrderingName::Workload => OrderingRule::EfficacyPerWorkload,
            OrderingName::Time => OrderingRule::EfficacyPerTime,
        },
        capacity_mode: match capacity {
            CapacityName::Gated => CapacityMode::HeadcountGated,
            CapacityName::Literal => CapacityMode::PaperLiteral,
        },
        allow_overflow,
    }
}

fn resolve_workforce(inst: &Instance, w: Option<&Workforce>) -> Result<Vec<u32>, ApiError> {
    let mut out = inst.workforce();
    match w {
        None => {}
        Some(Workforce::List(v)) => {
            if v.len() != out.len() {
                return Err(invalid(&[ModelError::WorkforceLength {
                    expected: out.len(),
                    got: v.len(),
                }]));
            }
            out.clone_from(v);
        }
        Some(Workforce::Map(m)) => {
            for (id, &b) in m {
                let k = inst.skill_index(id).ok_or_else(|| ApiError::Unprocessable {
                    error: "validation failed".into(),
                    details: vec![format!("unknown skill `{id}`")],
                })?;
                out[k] = b;
            }
        }
    }
    Ok(out)
}

fn scenario(inst: &Instance, workforce: &[u32]) -> Result<Instance, ApiError> {
    if workforce == inst.workforce() {
        return Ok(inst.clone());
    }
    let mut raw = inst.to_raw();
    for (s, &b) in raw.skills.iter_mut().zip(workforce) {
        s.available = b;
    }
    match instance_from_raw(&raw) {
        Ok(i) => Ok(i),
        Err(FormatError::Invalid(errors)) => Err(invalid(&errors)),
        Err(e) => Err(ApiError::BadRequest(e.to_string())),
    }
}

#[derive(Debug, Serialize)]
struct TraceSummary {
    skill: String,
    iterations: usize,
    started: usize,
    unplaced: Vec<String>,
}

/// The cacheable part of a solve response.
#[derive(Debug, Serialize)]
struct SolveCore {
    workforce: BTreeMap<String, u32>,
    schedule: ScheduleExport,
    #[serde(rename = "Z")]
    z: Option<f64>,
    #[serde(rename = "Z_unit")]
    z_unit: Option<f64>,
    #[serde(rename = "Z_k")]
    z_k: Option<BTreeMap<String, f64>>,
    headcount: BTreeMap<String, Vec<u32>>,
    trace_summary: Vec<TraceSummary>,
    #[serde(skip)]
    trace: Vec<TraceExport>,
}

fn solve_core(state: &AppState, session: &Session, workforce: &[u32], cfg: EdmConfig) -> Result<Arc<SolveCore>, ApiError> {
    let key = (session.checksum.clone(), workforce.to_vec(), cfg);
    if let Some(hit) = state.0.cache.lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let inst = scenario(&session.instance, workforce)?;
    let sol = edm_solve(&inst, &cfg);
    let export = ScheduleExport::new(&inst, &sol.schedule, sol.objective.as_ref());
    let ids = |jobs: &[usize]| jobs.iter().map(|&m| inst.jobs()[m].id().to_string()).collect();
    let core = Arc::new(SolveCore {
        workforce: inst.skills().iter().map(|s| (s.id.clone(), s.available)).collect(),
        z: sol.objective.as_ref().map(|o| o.z),
        z_unit: sol.objective.as_ref().map(|o| o.unit_z(&inst)),
        z_k: export.objective.as_ref().map(|o| o.z_k.clone()),
        schedule: export,
        headcount: inst
            .skills()
            .iter()
            .enumerate()
            .map(|(k, s)| (s.id.clone(), headcount_profile(&inst, &sol.schedule, k).expect("skill in range")))
            .collect(),
        trace_summary: sol
            .runs
            .iter()
            .map(|r| TraceSummary {
                skill: inst.skills()[r.skill].id.clone(),
                iterations: r.trace.iterations.len(),
                started: r.trace.iterations.iter().map(|it| it.started.len()).sum(),
                unplaced: ids(&r.unplaced),
            })
            .collect(),
        trace: traces(&inst, &sol.runs),
    });
    state.0.cache.lock().expect("cache lock").put(key, core.clone());
    Ok(core)
}

async fn solve(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let req: SolveRequest = parse_body(&body)?;
    let session = state.current()?;
    check_pin(&session, &headers, req.checksum.as_deref())?;
    let cfg = edm_config(req.ordering, req.capacity_mode, req.allow_overflow);
    let workforce = resolve_workforce(&session.instance, req.workforce.as_ref())?;
    let core = solve_core(&state, &session, &workforce, cfg)?;
    let base = solve_core(&state, &session, &session.instance.workforce(), cfg)?;
    let gap = match (core.z, base.z) {
        (Some(z), Some(b)) if b > 0.0 => Some(100.0 * (z - b) / b),
        _ => None,
    };
    let mut payload = serde_json::to_value(&*core).expect("payload serializes");
    payload["checksum"] = json!(session.checksum);
    payload["baseline"] = json!({ "Z": base.z, "Z_unit": base.z_unit, "workforce": base.workforce });
    payload["gap_vs_baseline_pct"] = json!(gap);
    if req.trace {
        payload["trace"] = serde_json::to_value(&core.trace).expect("trace serializes");
    }
    Ok(with_checksum(&session, payload))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExactRequest {
    workforce: Option<Workforce>,
    max_nodes: Option<u64>,
    checksum: Option<String>,
}

fn guard(state: &AppState, inst: &Instance) -> Result<(), ApiError> {
    let size = estimated_search_size(inst);
    if size > state.0.config.exact_guard {
        return Err(ApiError::Unprocessable {
            error: "instance too large for the exact search".into(),
            details: vec![format!(
                "estimated search size {size:.3e} exceeds the limit {:.3e}",
                state.0.config.exact_guard
            )],
        });
    }
    Ok(())
}

async fn exact(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let req: ExactRequest = parse_body(&body)?;
    let session = state.current()?;
    check_pin(&session, &headers, req.checksum.as_deref())?;
    let workforce = resolve_workforce(&session.instance, req.workforce.as_ref())?;
    let inst = scenario(&session.instance, &workforce)?;
    guard(&state, &inst)?;
    let cfg = &state.0.config;
    let max_nodes = req.max_nodes.unwrap_or(cfg.exact_max_nodes).clamp(1, cfg.exact_max_nodes);
    let limits = SearchLimits::new(max_nodes, Some(cfg.exact_max_time), SearchMode::BestEffort)
        .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let result = tokio::task::spawn_blocking(move || {
        let clock = WallClock::start();
        let control = SearchControl {
            clock: &clock,
            cancel: None,
        };
        let res = exact_solve_with(&inst, &limits, control);
        (inst, res)
    })
    .await
    .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let payload = match result {
        (inst, Ok(res)) => {
            let obj = objective(&inst, &res.schedule).ok();
            json!({
                "checksum": session.checksum,
                "proof": match res.proof { Proof::Optimal => "optimal", Proof::BestFound => "best-found" },
                "nodes": res.nodes,
                "Z": res.value,
                "Z_unit": res.value * inst.weight_total(),
                "schedule": ScheduleExport::new(&inst, &res.schedule, obj.as_ref()),
            })
        }
        (_, Err(e @ (ExactError::NoFeasibleSchedule { .. } | ExactError::LimitsExceededWithoutIncumbent { .. }))) => {
            json!({
                "checksum": session.checksum,
                "proof": "no-schedule",
                "message": e.to_string(),
            })
        }
        (_, Err(e)) => return Err(ApiError::BadRequest(e.to_string())),
    };
    Ok(with_checksum(&session, payload))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRequest {
    alphas: Option<Vec<f64>>,
    #[serde(default)]
    exact: bool,
    #[serde(default)]
    ordering: OrderingName,
    #[serde(default)]
    capacity_mode: CapacityName,
    checksum: Option<String>,
}

async fn sweep(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let req: SweepRequest = parse_body(&body)?;
    let session = state.current()?;
    check_pin(&session, &headers, req.checksum.as_deref())?;
    let alphas = req.alphas.unwrap_or_else(|| ALPHA_GRID.to_vec());
    if alphas.is_empty() {
        return Err(ApiError::BadRequest("alphas must not be empty".into()));
    }
    if req.exact {
        guard(&state, &session.instance)?;
    }
    let cfg = edm_config(req.ordering, req.capacity_mode, false);
    let limits = SearchLimits::new(
        state.0.config.exact_max_nodes,
        Some(state.0.config.exact_max_time),
        SearchMode::BestEffort,
    )
    .expect("nonzero limit");
    let s = session.clone();
    let rows = tokio::task::spawn_blocking(move || parallel_sweep(&s.instance, &alphas, &cfg, &limits, req.exact))
        .await
        .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut payload = serde_json::to_value(SweepReport::new(&rows, false)).expect("report serializes");
    payload["checksum"] = json!(session.checksum);
    Ok(with_checksum(&session, payload))
}
