//! HTTP API over the engine.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::{Engine, RetrievedPassage, TurnError};
use crate::payload::RoutePayload;
use crate::session::{SessionError, SessionStore};

pub struct AppState {
    pub engine: Engine,
    pub sessions: SessionStore,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error_code": self.code, "message": self.message}))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::UnknownSession(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_session", e.to_string()),
            other => {
                tracing::error!(error = %other, "session store failure");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "session storage failed")
            }
        }
    }
}

#[derive(Deserialize)]
struct MessageRequest {
    #[serde(default)]
    utterance: String,
}

#[derive(Serialize)]
struct MessageResponse {
    answer: String,
    intent_kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    payload: Option<RoutePayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    passages: Option<Vec<RetrievedPassage>>,
    grounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Serializes with a fixed field order so identical state gives identical bytes.
fn json_response(status: StatusCode, value: &impl Serialize) -> Response {
    let body = serde_json::to_vec(value).expect("response serializes");
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn health(State(app): State<Arc<AppState>>) -> Response {
    json_response(
        StatusCode::OK,
        &json!({
            "status": "ok",
            "corpus_size": app.engine.corpus.len(),
            "graph_nodes": app.engine.graph.node_count(),
        }),
    )
}

async fn create_session(State(app): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let id = app.sessions.create()?;
    tracing::info!(session = %id, "session created");
    Ok(json_response(StatusCode::CREATED, &json!({"session_id": id})))
}

async fn post_message(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let session = app.sessions.get(&id)?;
    let utterance = if body.iter().all(u8::is_ascii_whitespace) {
        String::new()
    } else {
        serde_json::from_slice::<MessageRequest>(&body)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", format!("invalid JSON body: {e}")))?
            .utterance
    };
    if utterance.trim().is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "empty_utterance", "utterance must not be empty"));
    }
    let app2 = Arc::clone(&app);
    let result = tokio::task::spawn_blocking(move || {
        // Held for the whole turn: turns of one session run one at a time.
        let mut state = session.lock();
        let (result, record) = app2.engine.run_turn(&utterance);
        if let Some(r) = record {
            app2.sessions.record(&id, &mut state, r)?;
        }
        Ok::<_, SessionError>(result)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    match result {
        Ok(turn) => {
            let passages = (turn.intent == "information").then_some(turn.passages);
            Ok(json_response(
                StatusCode::OK,
                &MessageResponse {
                    answer: turn.answer,
                    intent_kind: turn.intent,
                    payload: turn.payload,
                    passages,
                    grounded: turn.grounded,
                    error: turn.error,
                },
            ))
        }
        Err(TurnError::EmptyUtterance) => {
            Err(ApiError::new(StatusCode::BAD_REQUEST, "empty_utterance", "utterance must not be empty"))
        }
        Err(TurnError::ClientFailure { message, .. }) => {
            Err(ApiError::new(StatusCode::BAD_GATEWAY, "client_failure", message))
        }
    }
}

async fn get_route(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.sessions.get(&id)?;
    let route = session.lock().last_route.clone();
    let route = route
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no_active_route", "this session has no route yet"))?;
    Ok(json_response(StatusCode::OK, &json!({"payload": route.payload, "geometry": route.geojson()})))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/messages", post(post_message))
        .route("/api/sessions/{id}/route", get(get_route))
        .fallback(not_found)
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, listen: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
