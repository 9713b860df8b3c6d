//! JSON-over-HTTP service under `/v1`.
//!
//! A session owns one immutable [`DbsModel`] built by a background job.
//! Only the current cut and the manual outlier marks change afterwards;
//! writes to them go through a per-session mutex.

use std::collections::{BTreeSet, HashMap};
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dbs_core::clustering::{ClusterMode, ClusterResult, Dendrogram, Merge};
use dbs_core::data::{euclidean_dissimilarity, generate_fcps, Dataset, DissimilarityMatrix, FcpsName};
use dbs_core::grid::GridConfig;
use dbs_core::pswarm::{ProjectionDocument, PswarmParams};
use dbs_core::topomap::TopoMapDocument;
use dbs_core::{DbsError, DbsModel};
use serde::{Deserialize, Serialize};

pub const API_VERSION: &str = "v1";
pub const PORT_ENV: &str = "DBS_PORT";
pub const DEFAULT_PORT: u16 = 8080;

/// Error body: `{"error": "..."}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<DbsError> for ApiError {
    fn from(e: DbsError) -> Self {
        use DbsError::*;
        let status = match e {
            InvalidDataset(_) | NonFinite { .. } | Parse { .. } | Asymmetric { .. } | InvalidMatrix(_) | AllZeroDistances
            | TooFewPoints(_) | TooManyPoints { .. } | UnknownDataset(_) | InvalidK { .. } | InvalidParameter(_) | Empty
            | LengthMismatch(..) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::unprocessable(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::unprocessable(e.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: &self.message })).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetBody {
    #[serde(default)]
    pub name: Option<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub labels: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FcpsBody {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Exactly one of `dataset`, `matrix` or `fcps` must be set.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default)]
    pub dataset: Option<DatasetBody>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Generated FCPS-style dataset.
    #[serde(default)]
    pub fcps: Option<FcpsBody>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub params: Option<PswarmParams>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Running,
    Ready,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionStatus {
    pub session_id: String,
    pub status: JobState,
    pub n_points: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterRequest {
    pub k: usize,
    pub mode: ClusterMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierAction {
    Mark,
    Unmark,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutlierRequest {
    pub point_ids: Vec<usize>,
    pub action: OutlierAction,
}

#[derive(Debug, Deserialize)]
struct DendrogramQuery {
    mode: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DendrogramBody {
    pub mode: ClusterMode,
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
    pub leaf_order: Vec<usize>,
}

impl DendrogramBody {
    fn new(mode: ClusterMode, d: &Dendrogram) -> Self {
        Self {
            mode,
            n_leaves: d.n_leaves(),
            merges: d.merges().to_vec(),
            leaf_order: d.leaf_order().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportBundle {
    pub version: u32,
    pub session_id: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i64>>,
    pub projection: ProjectionDocument,
    pub topomap: TopoMapDocument,
    pub dendrograms: Vec<DendrogramBody>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<ClusterResult>,
    pub marked: Vec<usize>,
}

struct Session {
    model: DbsModel,
    labels: Option<Vec<i64>>,
    cut: Mutex<CutState>,
}

#[derive(Default)]
struct CutState {
    base: Option<ClusterResult>,
    marked: BTreeSet<usize>,
}

impl CutState {
    fn current(&self) -> Option<Result<ClusterResult, DbsError>> {
        self.base.as_ref().map(|b| b.with_marked(&self.marked))
    }
}

enum Job {
    Running,
    Ready(Arc<Session>),
    Failed(String),
}

struct Slot {
    id: String,
    n: usize,
    seed: u64,
    job: RwLock<Job>,
}

impl Slot {
    fn status(&self) -> SessionStatus {
        let job = self.job.read().unwrap();
        let (status, error, grid) = match &*job {
            Job::Running => (JobState::Running, None, None),
            Job::Ready(s) => (JobState::Ready, None, Some(s.model.projection().grid.clone())),
            Job::Failed(e) => (JobState::Failed, Some(e.clone()), None),
        };
        SessionStatus {
            session_id: self.id.clone(),
            status,
            n_points: self.n,
            seed: self.seed,
            error,
            grid,
        }
    }
}

/// Shared registry of sessions.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Arc<Slot>>>>,
    counter: Arc<AtomicU64>,
}

impl AppState {
    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id:?}")))
    }

    /// Ready session, 409 while the projection job is running.
    fn session(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let slot = self.slot(id)?;
        let job = slot.job.read().unwrap();
        match &*job {
            Job::Ready(s) => Ok(s.clone()),
            Job::Running => Err(ApiError::new(StatusCode::CONFLICT, format!("session {id} is still projecting"))),
            Job::Failed(e) => Err(ApiError::new(StatusCode::CONFLICT, format!("session {id} failed: {e}"))),
        }
    }
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_status))
        .route("/sessions/{id}/map", get(get_map))
        .route("/sessions/{id}/projection", get(get_projection))
        .route("/sessions/{id}/dendrogram", get(get_dendrogram))
        .route("/sessions/{id}/cluster", post(post_cluster))
        .route("/sessions/{id}/outliers", post(post_outliers))
        .route("/sessions/{id}/export", get(get_export));
    Router::new().nest(&format!("/{API_VERSION}"), api).with_state(state)
}

/// Serves on `127.0.0.1:port` until the process is stopped.
pub async fn serve(port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("dbs: serving /{API_VERSION} on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::default())).await
}

fn parse_input(req: CreateSession) -> Result<(DissimilarityMatrix, Option<Vec<i64>>), ApiError> {
    let given = [req.dataset.is_some(), req.matrix.is_some(), req.fcps.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(ApiError::unprocessable("exactly one of `dataset`, `matrix` or `fcps` is required"));
    }
    if let Some(ds) = req.dataset {
        let ds = Dataset::new(ds.name.unwrap_or_else(|| "dataset".into()), ds.rows, ds.labels)?;
        let labels = ds.labels().map(<[i64]>::to_vec);
        return Ok((euclidean_dissimilarity(&ds), labels));
    }
    if let Some(rows) = req.matrix {
        return Ok((DissimilarityMatrix::from_rows(rows)?, None));
    }
    let f = req.fcps.unwrap();
    let ds = generate_fcps(f.name.parse::<FcpsName>()?, f.seed);
    let labels = ds.labels().map(<[i64]>::to_vec);
    Ok((euclidean_dissimilarity(&ds), labels))
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionStatus>), ApiError> {
    let Json(req) = body?;
    let seed = req.seed;
    let params = req.params.clone().unwrap_or_default();
    let (d, labels) = parse_input(req)?;
    let n = d.len();
    if n < 3 {
        return Err(DbsError::TooFewPoints(n).into());
    }
    if n > params.max_points {
        return Err(DbsError::TooManyPoints { n, cap: params.max_points }.into());
    }
    let id = format!("s{:06}", state.counter.fetch_add(1, Ordering::Relaxed) + 1);
    let slot = Arc::new(Slot {
        id: id.clone(),
        n,
        seed,
        job: RwLock::new(Job::Running),
    });
    state.sessions.write().unwrap().insert(id, slot.clone());
    let job_slot = slot.clone();
    tokio::spawn(async move {
        let built = tokio::task::spawn_blocking(move || DbsModel::build(d, &params, seed)).await;
        let job = match built {
            Ok(Ok(model)) => Job::Ready(Arc::new(Session {
                model,
                labels,
                cut: Mutex::new(CutState::default()),
            })),
            Ok(Err(e)) => Job::Failed(e.to_string()),
            Err(e) => Job::Failed(format!("projection job aborted: {e}")),
        };
        *job_slot.job.write().unwrap() = job;
    });
    Ok((StatusCode::ACCEPTED, Json(slot.status())))
}

async fn session_status(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<SessionStatus> {
    Ok(Json(state.slot(&id)?.status()))
}

async fn get_map(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<TopoMapDocument> {
    Ok(Json(state.session(&id)?.model.topomap().to_document()))
}

async fn get_projection(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<ProjectionDocument> {
    Ok(Json(state.session(&id)?.model.projection().to_document()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn get_dendrogram(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<DendrogramQuery>, QueryRejection>,
) -> ApiResult<DendrogramBody> {
    let Query(q) = query?;
    let session = state.session(&id)?;
    let mode: ClusterMode = q
        .mode
        .ok_or_else(|| ApiError::unprocessable("query parameter `mode` is required"))?
        .parse()?;
    blocking(move || Ok(Json(DendrogramBody::new(mode, session.model.dendrogram(mode)?)))).await
}

async fn post_cluster(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<ClusterRequest>, JsonRejection>,
) -> ApiResult<ClusterResult> {
    let Json(req) = body?;
    let session = state.session(&id)?;
    blocking(move || {
        let mut cut = session.cut.lock().unwrap();
        let base = session.model.cluster(req.k, req.mode)?;
        let result = base.with_marked(&cut.marked)?;
        cut.base = Some(base);
        Ok(Json(result))
    })
    .await
}

async fn post_outliers(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<OutlierRequest>, JsonRejection>,
) -> ApiResult<ClusterResult> {
    let Json(req) = body?;
    let session = state.session(&id)?;
    let n = session.model.len();
    if let Some(&bad) = req.point_ids.iter().find(|&&p| p >= n) {
        return Err(ApiError::unprocessable(format!("point id {bad} out of range for {n} points")));
    }
    let mut cut = session.cut.lock().unwrap();
    let Some(base) = cut.base.clone() else {
        return Err(ApiError::new(StatusCode::CONFLICT, "no clustering yet; POST /cluster first"));
    };
    let mut marked = cut.marked.clone();
    match req.action {
        OutlierAction::Mark => marked.extend(req.point_ids),
        OutlierAction::Unmark => {
            for p in &req.point_ids {
                marked.remove(p);
            }
        }
    }
    let result = base.with_marked(&marked)?;
    cut.marked = marked;
    Ok(Json(result))
}

async fn get_export(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<ExportBundle> {
    let session = state.session(&id)?;
    let slot = state.slot(&id)?;
    blocking(move || {
        let m = &session.model;
        let mut dendrograms = Vec::new();
        for mode in [ClusterMode::Connected, ClusterMode::Compact] {
            dendrograms.push(DendrogramBody::new(mode, m.dendrogram(mode)?));
        }
        let cut = session.cut.lock().unwrap();
        let clusters = cut.current().transpose()?;
        Ok(Json(ExportBundle {
            version: 1,
            session_id: slot.id.clone(),
            seed: slot.seed,
            labels: session.labels.clone(),
            projection: m.projection().to_document(),
            topomap: m.topomap().to_document(),
            dendrograms,
            clusters,
            marked: cut.marked.iter().copied().collect(),
        }))
    })
    .await
}
