//! JSON-over-HTTP access to a session store.
//!
//! Writes to one session go through a per-session async mutex, so edits,
//! checkpoints and restores on the same session are applied one at a time.
//! Different sessions proceed in parallel.

mod error;

use std::collections::HashMap;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::header;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tabforge_core::editor::{apply_edit, default_rules, lint_session, AnnotationSession, ConstraintRule, EditCommand};
use tabforge_core::store::{build_export, SessionStore, StoreError};
use tabforge_core::CategoryMap;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use error::{status_for, ApiError, ERROR_CODES};

/// File in the store root holding the key → type-group map.
pub const CATEGORY_MAP_FILE: &str = "category_map.json";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub store_dir: PathBuf,
    pub rules: Vec<ConstraintRule>,
    pub ui_dir: Option<PathBuf>,
    /// When `None`, read from [`CATEGORY_MAP_FILE`] in the store, or empty.
    pub category_map: Option<CategoryMap>,
}

impl ServerConfig {
    pub fn new(store_dir: impl Into<PathBuf>) -> Self {
        Self {
            store_dir: store_dir.into(),
            rules: default_rules(),
            ui_dir: None,
            category_map: None,
        }
    }
}

/// Reads the store's category map. A missing file gives an empty map.
pub fn load_category_map(store_dir: &Path) -> io::Result<CategoryMap> {
    match std::fs::read_to_string(store_dir.join(CATEGORY_MAP_FILE)) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(CategoryMap::new()),
        Err(e) => Err(e),
    }
}

struct AppState {
    store: SessionStore,
    cmap: CategoryMap,
    rules: Vec<ConstraintRule>,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    fn lock_for(&self, session_id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(session_id.to_owned()).or_default().clone()
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

const PLACEHOLDER_PAGE: &str = "<!doctype html>\n<title>tabforge</title>\n<p>No UI assets configured. Start the server with <code>--ui-dir</code>, or use the JSON API under <code>/api</code>.</p>\n";

/// Builds the application router.
pub fn router(config: ServerConfig) -> io::Result<Router> {
    let store = SessionStore::open(&config.store_dir).map_err(|e| io::Error::other(e.to_string()))?;
    let cmap = match config.category_map {
        Some(m) => m,
        None => load_category_map(&config.store_dir)?,
    };
    let state = Arc::new(AppState {
        store,
        cmap,
        rules: config.rules,
        locks: Mutex::new(HashMap::new()),
    });
    let api = Router::new()
        .route("/api/sessions", get(list_sessions))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/edits", post(post_edit))
        .route(
            "/api/sessions/{id}/checkpoints",
            get(list_checkpoints).post(post_checkpoint),
        )
        .route("/api/sessions/{id}/restore/{ckpt}", post(post_restore))
        .route("/api/sessions/{id}/lint", get(get_lint))
        .route("/api/export", get(get_export))
        .route("/api/{*rest}", get(api_not_found).post(api_not_found))
        .with_state(state);
    Ok(match config.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })),
    })
}

/// Binds `addr` and serves until the process stops.
pub async fn serve(config: ServerConfig, addr: SocketAddr) -> io::Result<()> {
    let app = router(config)?;
    let listener = TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}

/// Serializes with the session's own canonical JSON so repeated reads are
/// byte-identical.
fn session_response(s: &AnnotationSession) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], s.to_json()).into_response()
}

async fn api_not_found() -> ApiError {
    ApiError::new("not_found", "no such endpoint")
}

async fn list_sessions(State(st): State<Shared>) -> ApiResult<Json<Vec<String>>> {
    Ok(Json(st.store.list_sessions()?))
}

async fn get_session(State(st): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    Ok(session_response(&st.store.load_session(&id)?))
}

#[derive(Deserialize)]
struct EditRequest {
    #[serde(default)]
    expected_revision: Option<u64>,
    #[serde(flatten)]
    command: EditCommand,
}

async fn post_edit(State(st): State<Shared>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult<Response> {
    let req: EditRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("malformed edit command: {e}")))?;
    let lock = st.lock_for(&id);
    let _guard = lock.lock().await;
    let current = st.store.load_session(&id)?;
    if let Some(expected) = req.expected_revision {
        if expected != current.revision {
            return Err(ApiError::new(
                "revision_conflict",
                format!("session is at revision {}, not {expected}", current.revision),
            )
            .with_details(json!({ "current_revision": current.revision, "expected_revision": expected })));
        }
    }
    let next = apply_edit(&current, &req.command, &st.cmap)?;
    st.store.put_session(&next)?;
    Ok(session_response(&next))
}

async fn post_checkpoint(State(st): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<serde_json::Value>> {
    let lock = st.lock_for(&id);
    let _guard = lock.lock().await;
    let s = st.store.load_session(&id)?;
    let checkpoint_id = st.store.save_checkpoint(&s)?;
    Ok(Json(json!({ "checkpoint_id": checkpoint_id, "revision": s.revision })))
}

async fn list_checkpoints(State(st): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    st.store.load_session(&id)?;
    Ok(Json(st.store.list_checkpoints(&id)?).into_response())
}

/// Installs a checkpoint as the working state. The revision keeps counting
/// up from the current head so stale clients see a conflict.
async fn post_restore(State(st): State<Shared>, UrlPath((id, ckpt)): UrlPath<(String, String)>) -> ApiResult<Response> {
    let lock = st.lock_for(&id);
    let _guard = lock.lock().await;
    let current = st.store.load_session(&id)?;
    let mut restored = st.store.restore_checkpoint(&id, &ckpt)?;
    restored.revision = current.revision + 1;
    st.store.put_session(&restored)?;
    Ok(session_response(&restored))
}

async fn get_lint(State(st): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let s = st.store.load_session(&id)?;
    Ok(Json(lint_session(&s, &st.rules)).into_response())
}

#[derive(Deserialize)]
struct ExportQuery {
    #[serde(default)]
    force: bool,
}

async fn get_export(State(st): State<Shared>, Query(q): Query<ExportQuery>) -> ApiResult<Response> {
    let sessions = st.store.load_all()?;
    let (bundle, summary) = build_export(&sessions, &st.rules, q.force).map_err(|e| match e {
        StoreError::InvalidId(_) => ApiError::new("storage_failure", e.to_string()),
        e => e.into(),
    })?;
    Ok(Json(json!({ "files": bundle.files, "warnings": summary.warnings })).into_response())
}
