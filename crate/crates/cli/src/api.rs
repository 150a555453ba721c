//! JSON API for the analyst console.
//!
//! Computation endpoints are pure functions of the request body (plus the
//! stored project when one is referenced). Errors are problem documents
//! `{ "code", "message", "details": [...] }`.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use creamkit::reporting::LabeledProfile;
use creamkit::whatif::sweep_is_flat;
use creamkit::{
    best_improvement, load_taxonomy, parse_hta, screen, single_cpc_sweep, validate_hta, AnalysisError,
    AssignmentResult, CpcAssessment, ExtendedResult, Provenance, ReportBundle, ReportOptions, ScreeningResult,
    TaskTree, Taxonomy, TaxonomyError, WhatIfDelta,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::projects::{Project, ProjectStore, StoreError};

pub const TAXONOMY_VERSION_HEADER: &str = "x-taxonomy-version";

const CONSOLE_HTML: &str = include_str!("../assets/index.html");

#[derive(Clone)]
pub struct AppState {
    store: Arc<ProjectStore>,
    taxonomy: Arc<Taxonomy>,
}

impl AppState {
    /// `taxonomy` is the service default: the env-selected file or the built-in.
    pub fn new(store: ProjectStore, taxonomy: Taxonomy) -> Self {
        AppState { store: Arc::new(store), taxonomy: Arc::new(taxonomy) }
    }

    pub fn store(&self) -> &ProjectStore {
        &self.store
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/", get(console))
        .route("/api/taxonomy", get(get_taxonomy))
        .route("/api/hta/validate", post(validate_document))
        .route("/api/screening", post(screening))
        .route("/api/analysis", post(analysis))
        .route("/api/whatif", post(whatif))
        .route("/api/projects/{id}", get(get_project).put(put_project))
        .fallback(not_found)
        .layer(middleware::from_fn_with_state(state.clone(), stamp_version))
        .with_state(state)
}

/// Adds the default taxonomy version unless the handler already set the
/// version it actually used.
async fn stamp_version(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let mut res = next.run(req).await;
    if !res.headers().contains_key(TAXONOMY_VERSION_HEADER) {
        if let Ok(v) = HeaderValue::from_str(&state.taxonomy.version) {
            res.headers_mut().insert(TAXONOMY_VERSION_HEADER, v);
        }
    }
    res
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    pub details: Vec<Value>,
}

impl Problem {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Problem { status: status.as_u16(), code: code.to_string(), message: message.into(), details: Vec::new() }
    }

    fn with_details<T: Serialize>(mut self, details: impl IntoIterator<Item = T>) -> Self {
        self.details = details.into_iter().map(|d| serde_json::to_value(d).expect("detail serializes")).collect();
        self
    }
}

impl IntoResponse for Problem {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<StoreError> for Problem {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::Missing(_) => Problem::new(StatusCode::NOT_FOUND, "project_missing", message),
            StoreError::Conflict { on_disk, base, .. } => {
                Problem::new(StatusCode::CONFLICT, "revision_conflict", message)
                    .with_details([json!({ "on_disk_revision": on_disk, "base_revision": base })])
            }
            StoreError::Invalid(problems) => {
                Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "project_invalid", message).with_details(problems)
            }
            StoreError::Corrupt { .. } | StoreError::Io { .. } | StoreError::Unwritable { .. } => {
                Problem::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", message)
            }
        }
    }
}

fn analysis_problem(e: AnalysisError) -> Problem {
    let message = e.to_string();
    match e {
        AnalysisError::InvalidTree(issues) => {
            Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "hta_invalid", message).with_details(issues)
        }
        _ => Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "assessment_invalid", message),
    }
}

/// JSON body with a version header naming the taxonomy that produced it.
struct Reply {
    version: String,
    body: Value,
}

impl Reply {
    fn new(taxonomy: &Taxonomy, body: impl Serialize) -> Self {
        Reply { version: taxonomy.version.clone(), body: serde_json::to_value(body).expect("reply serializes") }
    }
}

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        let mut res = Json(self.body).into_response();
        if let Ok(v) = HeaderValue::from_str(&self.version) {
            res.headers_mut().insert(TAXONOMY_VERSION_HEADER, v);
        }
        res
    }
}

type ApiResult = Result<Reply, Problem>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, Problem> {
    serde_json::from_slice(body)
        .map_err(|e| Problem::new(StatusCode::BAD_REQUEST, "malformed_request", format!("request body: {e}")))
}

/// Fields shared by the computation endpoints.
#[derive(Debug, Default, Deserialize)]
struct Common {
    /// Inline taxonomy document; wins over everything else.
    #[serde(default)]
    taxonomy: Option<Value>,
    /// Stored project supplying the tree, named assessments and override.
    #[serde(default)]
    project: Option<String>,
}

struct Resolved {
    taxonomy: Arc<Taxonomy>,
    project: Option<Project>,
}

fn resolve(state: &AppState, common: &Common) -> Result<Resolved, Problem> {
    let project = match &common.project {
        Some(id) => Some(state.store.load(id)?),
        None => None,
    };
    let taxonomy = if let Some(doc) = &common.taxonomy {
        Arc::new(load_taxonomy(&doc.to_string()).map_err(taxonomy_problem)?)
    } else if let Some(t) = project.as_ref().and_then(|p| p.taxonomy_override.clone()) {
        Arc::new(t)
    } else {
        state.taxonomy.clone()
    };
    Ok(Resolved { taxonomy, project })
}

fn taxonomy_problem(e: TaxonomyError) -> Problem {
    let message = e.to_string();
    match e {
        TaxonomyError::Invalid(issues) => {
            Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "taxonomy_invalid", message).with_details(issues)
        }
        _ => Problem::new(StatusCode::BAD_REQUEST, "taxonomy_malformed", message),
    }
}

/// An inline assessment, or the name of one stored in the project.
enum AssessmentRef {
    Inline(CpcAssessment),
    Named(String),
}

// Not `#[serde(untagged)]`: buffered maps lose the integer CPC keys.
fn assessment_ref(v: Option<Value>) -> Result<Option<AssessmentRef>, Problem> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(name)) => Ok(Some(AssessmentRef::Named(name))),
        Some(v) => serde_json::from_value(v)
            .map(|a| Some(AssessmentRef::Inline(a)))
            .map_err(|e| Problem::new(StatusCode::BAD_REQUEST, "malformed_request", format!("assessment: {e}"))),
    }
}

fn pick_assessment(
    r: Option<AssessmentRef>,
    project: Option<&Project>,
    taxonomy: &Taxonomy,
) -> Result<CpcAssessment, Problem> {
    let a = match r {
        Some(AssessmentRef::Inline(a)) => a,
        Some(AssessmentRef::Named(name)) => {
            project.and_then(|p| p.assessments.get(&name).cloned()).ok_or_else(|| {
                Problem::new(StatusCode::NOT_FOUND, "assessment_missing", format!("no stored assessment `{name}`"))
            })?
        }
        None => Err(Problem::new(StatusCode::BAD_REQUEST, "malformed_request", "request needs an `assessment`"))?,
    };
    a.check(taxonomy)
        .map_err(|e| Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "assessment_invalid", e.to_string()))?;
    Ok(a)
}

fn pick_tree(document: Option<&str>, project: Option<&Project>, taxonomy: &Taxonomy) -> Result<TaskTree, Problem> {
    let tree = match (document, project) {
        (Some(text), _) => parse_document(text)?,
        (None, Some(p)) => p.hta.clone(),
        (None, None) => {
            return Err(Problem::new(
                StatusCode::BAD_REQUEST,
                "malformed_request",
                "request needs a `document` or a `project`",
            ))
        }
    };
    let report = validate_hta(&tree, taxonomy);
    if !report.is_valid() {
        return Err(Problem::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "hta_invalid",
            "task analysis has validation issues",
        )
        .with_details(report.issues));
    }
    Ok(tree)
}

fn parse_document(text: &str) -> Result<TaskTree, Problem> {
    parse_hta(text).map_err(|e| {
        Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "hta_parse", format!("{} parse error(s)", e.0.len()))
            .with_details(e.0)
    })
}

async fn console() -> Html<&'static str> {
    Html(CONSOLE_HTML)
}

async fn not_found() -> Problem {
    Problem::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

async fn get_taxonomy(State(state): State<AppState>) -> Response {
    let mut res = ([(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], state.taxonomy.to_json())
        .into_response();
    if let Ok(v) = HeaderValue::from_str(&state.taxonomy.version) {
        res.headers_mut().insert(TAXONOMY_VERSION_HEADER, v);
    }
    res
}

#[derive(Debug, Deserialize)]
struct ValidateRequest {
    document: String,
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Serialize)]
struct ValidateResponse {
    valid: bool,
    nodes: usize,
    assignments: usize,
    tree: TaskTree,
}

/// Accepts `{ "document": "..." }` or the raw `.hta` text as the body.
async fn validate_document(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req = if body.first() == Some(&b'{') {
        parse_body::<ValidateRequest>(&body)?
    } else {
        let text = std::str::from_utf8(&body)
            .map_err(|_| Problem::new(StatusCode::BAD_REQUEST, "malformed_request", "body is not UTF-8"))?;
        ValidateRequest { document: text.to_string(), common: Common::default() }
    };
    let resolved = resolve(&state, &req.common)?;
    let tree = pick_tree(Some(&req.document), None, &resolved.taxonomy)?;
    Ok(Reply::new(
        &resolved.taxonomy,
        ValidateResponse { valid: true, nodes: tree.node_count(), assignments: tree.assignment_count(), tree },
    ))
}

/// The assessment itself, optionally with `taxonomy` / `project`.
#[derive(Debug, Deserialize)]
struct ScreeningRequest {
    #[serde(default)]
    label: String,
    #[serde(default)]
    choices: Option<BTreeMap<u32, String>>,
    #[serde(default)]
    assessment: Option<Value>,
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Serialize)]
struct ScreeningResponse {
    mode: creamkit::ControlMode,
    interval: [f64; 2],
    score: creamkit::CombinedScore,
    taxonomy_version: String,
}

impl ScreeningResponse {
    fn new(r: &ScreeningResult, taxonomy: &Taxonomy) -> Self {
        ScreeningResponse {
            mode: r.mode,
            interval: [r.hep_interval.lower, r.hep_interval.upper],
            score: r.score,
            taxonomy_version: taxonomy.version.clone(),
        }
    }
}

async fn screening(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: ScreeningRequest = parse_body(&body)?;
    let resolved = resolve(&state, &req.common)?;
    let assessment_ref = match req.choices {
        Some(choices) => Some(AssessmentRef::Inline(CpcAssessment { label: req.label, timestamp: None, choices })),
        None => assessment_ref(req.assessment)?,
    };
    let a = pick_assessment(assessment_ref, resolved.project.as_ref(), &resolved.taxonomy)?;
    let r = screen(&a, &resolved.taxonomy)
        .map_err(|e| Problem::new(StatusCode::UNPROCESSABLE_ENTITY, "assessment_invalid", e.to_string()))?;
    Ok(Reply::new(&resolved.taxonomy, ScreeningResponse::new(&r, &resolved.taxonomy)))
}

#[derive(Debug, Deserialize)]
struct AnalysisRequest {
    #[serde(default)]
    document: Option<String>,
    #[serde(default)]
    assessment: Option<Value>,
    #[serde(default = "default_top")]
    top: usize,
    #[serde(flatten)]
    common: Common,
}

fn default_top() -> usize {
    10
}

#[derive(Debug, Serialize)]
struct AnalysisResponse {
    screening: ScreeningResponse,
    extended: ExtendedResult,
    critical: Vec<AssignmentResult>,
    profiles: Vec<LabeledProfile>,
}

struct Prepared {
    taxonomy: Arc<Taxonomy>,
    tree: TaskTree,
    context: CpcAssessment,
}

fn prepare(state: &AppState, req: AnalysisRequest) -> Result<(Prepared, usize), Problem> {
    let resolved = resolve(state, &req.common)?;
    let tree = pick_tree(req.document.as_deref(), resolved.project.as_ref(), &resolved.taxonomy)?;
    let context = pick_assessment(assessment_ref(req.assessment)?, resolved.project.as_ref(), &resolved.taxonomy)?;
    Ok((Prepared { taxonomy: resolved.taxonomy, tree, context }, req.top))
}

async fn analysis(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let (p, top) = prepare(&state, parse_body(&body)?)?;
    let options = ReportOptions { top_k: top, include_sweep: false };
    // the bundle's provenance is not part of the response
    let prov = Provenance::new(&p.taxonomy, "");
    let bundle = ReportBundle::build(&p.tree, &p.context, &p.taxonomy, prov, &options).map_err(analysis_problem)?;
    Ok(Reply::new(
        &p.taxonomy,
        AnalysisResponse {
            screening: ScreeningResponse::new(&bundle.screening, &p.taxonomy),
            extended: bundle.extended,
            critical: bundle.critical,
            profiles: bundle.profiles,
        },
    ))
}

#[derive(Debug, Serialize)]
struct WhatIfResponse {
    baseline: ScreeningResponse,
    deltas: Vec<WhatIfDelta>,
    best: Option<WhatIfDelta>,
    flat: bool,
}

async fn whatif(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let (p, _) = prepare(&state, parse_body(&body)?)?;
    let baseline = screen(&p.context, &p.taxonomy).map_err(|e| analysis_problem(e.into()))?;
    let deltas = single_cpc_sweep(&p.tree, &p.context, &p.taxonomy).map_err(analysis_problem)?;
    Ok(Reply::new(
        &p.taxonomy,
        WhatIfResponse {
            baseline: ScreeningResponse::new(&baseline, &p.taxonomy),
            best: best_improvement(&deltas).cloned(),
            flat: sweep_is_flat(&deltas),
            deltas,
        },
    ))
}

fn project_reply(state: &AppState, p: Project) -> Reply {
    let taxonomy = p.taxonomy_override.clone().map(Arc::new).unwrap_or_else(|| state.taxonomy.clone());
    Reply::new(&taxonomy, p)
}

async fn get_project(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let p = state.store.load(&id)?;
    Ok(project_reply(&state, p))
}

/// Body is the project at the revision the client last saw. The response
/// carries the saved revision.
async fn put_project(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let mut value: Value = parse_body(&body)?;
    match value.get("id") {
        Some(Value::String(body_id)) if body_id != &id => {
            return Err(Problem::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "project_invalid",
                format!("body id `{body_id}` does not match path id `{id}`"),
            ))
        }
        _ => {
            if let Value::Object(map) = &mut value {
                map.insert("id".to_string(), Value::String(id.clone()));
            }
        }
    }
    let project: Project = serde_json::from_value(value)
        .map_err(|e| Problem::new(StatusCode::BAD_REQUEST, "malformed_request", format!("project: {e}")))?;
    let store = state.store.clone();
    let fallback = state.taxonomy.clone();
    let saved = tokio::task::spawn_blocking(move || store.save(&project, &fallback))
        .await
        .map_err(|e| Problem::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", e.to_string()))??;
    Ok(project_reply(&state, saved))
}
