//! HTTP backend for collecting Chakma translations of Bangla sentences.
//!
//! Contributors type Chakma in Bangla script; the server transliterates to
//! Chakma script for preview and storage, keeps every submission in an
//! append-only JSONL file and exports them as corpus records.
//!
//! | method | path | |
//! |---|---|---|
//! | GET | `/api/health` | liveness |
//! | GET | `/api/task/next` | next sentence to translate |
//! | GET | `/api/preview?text=` | `{ccp_text}` for the typed text |
//! | POST | `/api/submission` | `{task_id, raw_input, contributor}` |
//! | GET | `/api/export` | submissions as parallel-corpus JSONL |
//! | GET | `/` | static assets |

pub mod store;
pub mod tasks;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ccpmt::corpus::{ParallelRecord, Source, Split};
use ccpmt::textproc::{normalize, NormalizerConfig};
use ccpmt::translit::{bn_to_ccp, MappingTable, TransliterationMode};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use store::{NewSubmission, Recovery, StoreError, Submission, SubmissionStore};
pub use tasks::{load_tasks, read_tasks, Scheduler, Task, TaskError, TaskStatus};

pub const MAX_PREVIEW_CHARS: usize = 4096;

const PLACEHOLDER_PAGE: &str = include_str!("../static/index.html");

pub struct AppState {
    tasks: Vec<Task>,
    index: HashMap<String, usize>,
    scheduler: Mutex<Scheduler>,
    store: SubmissionStore,
    table: MappingTable,
    normalizer: NormalizerConfig,
}

impl AppState {
    /// Existing submissions in `store` count towards each task's total.
    pub fn new(tasks: Vec<Task>, store: SubmissionStore, table: MappingTable) -> Self {
        let index: HashMap<String, usize> = tasks.iter().enumerate().map(|(i, t)| (t.task_id.clone(), i)).collect();
        let mut scheduler = Scheduler::new(tasks.len());
        for sub in store.snapshot().iter() {
            if let Some(&i) = index.get(&sub.task_id) {
                scheduler.record_submission(i);
            }
        }
        AppState {
            tasks,
            index,
            scheduler: Mutex::new(scheduler),
            store,
            table,
            normalizer: NormalizerConfig::default(),
        }
    }

    pub fn store(&self) -> &SubmissionStore {
        &self.store
    }

    pub fn preview(&self, text: &str) -> String {
        bn_to_ccp(text, &self.table, TransliterationMode::default()).expect("passthrough never fails")
    }

    /// One record per submission, joined with its task. Submissions whose task
    /// is no longer in the task file are skipped.
    pub fn export_records(&self) -> Vec<ParallelRecord> {
        self.store
            .snapshot()
            .iter()
            .filter_map(|sub| {
                let task = &self.tasks[*self.index.get(&sub.task_id)?];
                Some(ParallelRecord {
                    id: format!("sub-{}", sub.submission_id),
                    ccp: normalize(&sub.ccp_text, &self.normalizer),
                    bn: normalize(&task.bn, &self.normalizer),
                    en: task
                        .en
                        .as_deref()
                        .map(|e| normalize(e, &self.normalizer))
                        .filter(|e| !e.is_empty()),
                    source: Source::NonExpert,
                    split: Split::Unassigned,
                    synthetic: false,
                })
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskView {
    pub task_id: String,
    pub bn_text: String,
    pub en_text: Option<String>,
    pub status: TaskStatus,
}

#[derive(Debug, Deserialize)]
pub struct PreviewQuery {
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreviewResponse {
    pub ccp_text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmissionRequest {
    pub task_id: String,
    pub raw_input: String,
    #[serde(default)]
    pub contributor: String,
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn next_task(State(state): State<Arc<AppState>>) -> Result<Json<TaskView>, ApiError> {
    let mut scheduler = state.scheduler.lock().expect("scheduler lock");
    let i = scheduler
        .pick()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no tasks available"))?;
    let task = &state.tasks[i];
    Ok(Json(TaskView {
        task_id: task.task_id.clone(),
        bn_text: task.bn.clone(),
        en_text: task.en.clone(),
        status: if scheduler.count(i) == 0 {
            TaskStatus::Open
        } else {
            TaskStatus::Submitted
        },
    }))
}

async fn preview(State(state): State<Arc<AppState>>, Query(q): Query<PreviewQuery>) -> Result<Json<PreviewResponse>, ApiError> {
    let len = q.text.chars().count();
    if len > MAX_PREVIEW_CHARS {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!("text has {len} characters, limit is {MAX_PREVIEW_CHARS}"),
        ));
    }
    Ok(Json(PreviewResponse {
        ccp_text: state.preview(&q.text),
    }))
}

async fn submit(State(state): State<Arc<AppState>>, Json(req): Json<SubmissionRequest>) -> Result<Json<Submission>, ApiError> {
    let &i = state
        .index
        .get(&req.task_id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown task `{}`", req.task_id)))?;
    if normalize(&req.raw_input, &state.normalizer).is_empty() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "raw_input is empty"));
    }
    let ccp_text = state.preview(&req.raw_input);
    let sub = state
        .store
        .append(NewSubmission {
            task_id: req.task_id,
            raw_input: req.raw_input,
            ccp_text,
            contributor: req.contributor,
        })
        .map_err(|e| {
            tracing::error!("append failed: {e}");
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "could not store submission")
        })?;
    state.scheduler.lock().expect("scheduler lock").record_submission(i);
    Ok(Json(sub))
}

async fn export(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    let mut body = String::new();
    for record in state.export_records() {
        body.push_str(&serde_json::to_string(&record).expect("record serializes"));
        body.push('\n');
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson; charset=utf-8")], body)
}

async fn placeholder() -> Html<&'static str> {
    Html(PLACEHOLDER_PAGE)
}

/// API routes plus static files from `static_dir` (or a built-in page) at `/`.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/task/next", get(next_task))
        .route("/api/preview", get(preview))
        .route("/api/submission", post(submit))
        .route("/api/export", get(export))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder)),
    }
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub tasks: PathBuf,
    pub store: PathBuf,
    pub map: Option<PathBuf>,
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Tasks(#[from] TaskError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Mapping(#[from] ccpmt::translit::MappingError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Loads everything named in `cfg`, logging what store recovery did.
pub fn build_state(cfg: &ServeConfig) -> Result<AppState, ServeError> {
    let tasks = load_tasks(&cfg.tasks)?;
    let (store, recovery) = SubmissionStore::open(&cfg.store)?;
    if recovery.truncated_bytes > 0 {
        tracing::warn!(
            "{}: discarded {} bytes of a partial trailing line",
            cfg.store.display(),
            recovery.truncated_bytes
        );
    }
    let table = match &cfg.map {
        Some(path) => MappingTable::load(path)?,
        None => MappingTable::builtin().clone(),
    };
    tracing::info!("{} tasks, {} stored submissions", tasks.len(), recovery.records);
    Ok(AppState::new(tasks, store, table))
}

/// Serves until ctrl-c.
pub async fn serve(cfg: ServeConfig) -> Result<(), ServeError> {
    let state = build_state(&cfg)?;
    serve_state(state, &cfg).await
}

/// Serves an already-built state on `cfg.addr` until ctrl-c.
pub async fn serve_state(state: AppState, cfg: &ServeConfig) -> Result<(), ServeError> {
    let app = router(Arc::new(state), cfg.static_dir.clone());
    let listener = tokio::net::TcpListener::bind(cfg.addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
