//! JSON-over-HTTP front-end for live sessions.

use std::collections::HashMap;
use std::future::Future;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dairector_core::session::{Clock, RequestKind, SessionConfig, SessionError, SessionStore, TranscriptEntry};
use dairector_core::story::{NameMap, StoryError};
use dairector_core::{Engine, Session};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;

pub struct AppState {
    engine: Engine,
    store: SessionStore,
    names: NameMap,
    clock: Arc<dyn Clock>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    pub fn new(engine: Engine, store: SessionStore, names: NameMap, clock: Arc<dyn Clock>) -> Self {
        Self {
            engine,
            store,
            names,
            clock,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    /// Live session by id, loading it from the store on first use.
    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let mut map = self.sessions.lock().expect("session map poisoned");
        if let Some(s) = map.get(id) {
            return Ok(s.clone());
        }
        let session = self.store.load(&self.engine, id)?;
        let s = Arc::new(Mutex::new(session));
        map.insert(id.to_string(), s.clone());
        Ok(s)
    }

    /// Saves every cached session; pending events are normally empty
    /// because each request saves on completion.
    pub fn persist_all(&self) -> Result<(), SessionError> {
        let map = self.sessions.lock().expect("session map poisoned");
        for s in map.values() {
            let mut s = s.lock().expect("session poisoned");
            self.store.save(&mut s)?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, code) = match &e {
            SessionError::UnknownSession(_) => (StatusCode::NOT_FOUND, "not_found"),
            SessionError::Ended => (StatusCode::CONFLICT, "ended"),
            SessionError::HashMismatch { .. } => (StatusCode::CONFLICT, "hash_mismatch"),
            SessionError::Story(
                StoryError::UnknownRoot(_) | StoryError::InvalidDepth | StoryError::EmptyContext,
            ) => (StatusCode::BAD_REQUEST, "bad_request"),
            SessionError::Story(StoryError::EmptyTiltPool | StoryError::NoPlotTropes) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "no_tilt")
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    seed: Option<u64>,
    root: Option<String>,
    max_depth: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdvanceBody {
    request: RequestKind,
    prompt: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EntryResponse {
    pub session_id: String,
    pub entry: TranscriptEntry,
    pub ended: bool,
    pub seq: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TranscriptResponse {
    pub session_id: String,
    pub seed: u64,
    pub ended: bool,
    pub seq: u64,
    pub transcript: Vec<TranscriptEntry>,
}

fn parse_body<T: for<'de> Deserialize<'de> + Default>(bytes: &[u8]) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let body: CreateBody = parse_body(&body)?;
    let config = SessionConfig {
        seed: body.seed,
        root: body.root,
        max_depth: body.max_depth,
    };
    let resp = blocking(move || {
        let mut session = state.engine.create_session(state.names.clone(), &config, state.clock.as_ref())?;
        state.store.save(&mut session)?;
        let resp = EntryResponse {
            session_id: session.id().to_string(),
            entry: session.last_entry().clone(),
            ended: session.is_ended(),
            seq: session.seq(),
        };
        tracing::info!(session = %resp.session_id, seed = session.seed(), "session created");
        state
            .sessions
            .lock()
            .expect("session map poisoned")
            .insert(resp.session_id.clone(), Arc::new(Mutex::new(session)));
        Ok(resp)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(resp)).into_response())
}

async fn advance(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<EntryResponse>, ApiError> {
    let body: AdvanceBody = if body.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::bad_request("missing body; expected {\"request\": \"platform\"|\"tilt\"}"));
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))?
    };
    let resp = blocking(move || {
        let handle = state.session(&id)?;
        let mut session = handle.lock().expect("session poisoned");
        let entry =
            state.engine.handle_request(&mut session, body.request, body.prompt.as_deref(), state.clock.as_ref())?;
        state.store.save(&mut session)?;
        Ok(EntryResponse {
            session_id: id,
            entry,
            ended: session.is_ended(),
            seq: session.seq(),
        })
    })
    .await?;
    Ok(Json(resp))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<TranscriptResponse>, ApiError> {
    let resp = blocking(move || {
        let handle = state.session(&id)?;
        let session = handle.lock().expect("session poisoned");
        Ok(TranscriptResponse {
            session_id: id,
            seed: session.seed(),
            ended: session.is_ended(),
            seq: session.seq(),
            transcript: session.transcript().to_vec(),
        })
    })
    .await?;
    Ok(Json(resp))
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "corpus_hash": state.engine.corpus_hash(),
        "model_hash": state.engine.model_hash(),
    }))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/advance", post(advance))
        .fallback(not_found)
        .with_state(state)
}

/// Serves until `shutdown` resolves, then waits for in-flight requests and
/// saves every live session.
pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()> {
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    state.persist_all()?;
    Ok(())
}
