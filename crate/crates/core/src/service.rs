//! HTTP/JSON adapter over [`Engine`].
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | GET | `/healthz` | | `{status, version}` |
//! | POST | `/models` | task-model XML | `{model_id}` |
//! | POST | `/sessions` | `{model_id, scenario, user, group?, weights?}` | `{session_id, fui}` |
//! | GET | `/sessions/{id}/fui` | | widget-tree document |
//! | POST | `/sessions/{id}/actions` | `{action, edit}` | `{enablement, fui_fragment?, current_panel, completed}` |
//! | POST | `/sessions/{id}/adaptation/trigger` | | `{proposals}` |
//! | POST | `/sessions/{id}/feedback` | `{verb, rating?, alternative_id?}` | `{fui}` |
//! | PUT | `/sessions/{id}/weights` | score weights | `{weights}` |
//! | DELETE | `/sessions/{id}` | | `204` |
//! | GET | `/groups/{gid}/alternatives?model=&user=` | | list |
//!
//! Errors are `{code, message, detail?}` with a status derived from the code.

use std::future::Future;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use crate::aui::{FuiDocument, ScoreWeights};
use crate::dialog::Edit;
use crate::engine::{
    Engine, EngineError, FeedbackDecision, GroupAlternative, ProposalView, Scenario,
};

pub type SharedEngine = Arc<Mutex<Engine>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl ApiError {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            detail: None,
        }
    }

    pub fn status(&self) -> StatusCode {
        match self.code.as_str() {
            "unknown_model" | "unknown_session" | "unknown_alternative" => StatusCode::NOT_FOUND,
            "action_disabled" | "session_completed" | "no_pending_proposals" | "model_conflict" => {
                StatusCode::CONFLICT
            }
            "store_error" | "internal" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let mut err = Self::new(e.code(), e.to_string());
        if let EngineError::ActionDisabled(action)
        | EngineError::TaskModel(crate::task_model::TaskModelError::UnknownAction(action)) = &e
        {
            err.detail = Some(serde_json::json!({ "action": action }));
        }
        err
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new("invalid_request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::new("invalid_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Health {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCreated {
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSession {
    pub model_id: String,
    pub scenario: Scenario,
    pub user: String,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub weights: Option<ScoreWeights>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionStarted {
    pub session_id: String,
    pub fui: FuiDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEvent {
    pub action: String,
    pub edit: Edit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Proposals {
    pub proposals: Vec<ProposalView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuiResponse {
    pub fui: FuiDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsResponse {
    pub weights: ScoreWeights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternativesQuery {
    pub model: String,
    #[serde(default)]
    pub user: Option<String>,
}

fn lock(engine: &SharedEngine) -> Result<MutexGuard<'_, Engine>, ApiError> {
    engine
        .lock()
        .map_err(|_| ApiError::new("internal", "engine state poisoned"))
}

pub fn router(engine: SharedEngine) -> Router {
    Router::new()
        .route("/healthz", get(health))
        .route("/models", post(create_model))
        .route("/sessions", post(start_session))
        .route("/sessions/:id", axum::routing::delete(close_session))
        .route("/sessions/:id/fui", get(session_fui))
        .route("/sessions/:id/actions", post(session_action))
        .route("/sessions/:id/adaptation/trigger", post(trigger))
        .route("/sessions/:id/feedback", post(feedback))
        .route("/sessions/:id/weights", put(weights))
        .route("/groups/:gid/alternatives", get(alternatives))
        .with_state(engine)
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

async fn create_model(State(engine): State<SharedEngine>, xml: String) -> ApiResult<ModelCreated> {
    let model_id = lock(&engine)?.register_model(&xml)?;
    Ok(Json(ModelCreated { model_id }))
}

async fn start_session(
    State(engine): State<SharedEngine>,
    body: Result<Json<StartSession>, JsonRejection>,
) -> ApiResult<SessionStarted> {
    let Json(req) = body?;
    let (session_id, fui) = lock(&engine)?.start_session(
        &req.model_id,
        req.scenario,
        &req.user,
        req.group.as_deref(),
        req.weights,
    )?;
    Ok(Json(SessionStarted { session_id, fui }))
}

async fn close_session(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    lock(&engine)?.close_session(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn session_fui(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
) -> ApiResult<FuiDocument> {
    Ok(Json(lock(&engine)?.fui(&id)?))
}

async fn session_action(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
    body: Result<Json<ActionEvent>, JsonRejection>,
) -> ApiResult<crate::engine::ActionOutcome> {
    let Json(ev) = body?;
    Ok(Json(
        lock(&engine)?.handle_action(&id, &ev.action, ev.edit)?,
    ))
}

async fn trigger(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
) -> ApiResult<Proposals> {
    let mut engine = lock(&engine)?;
    engine.trigger_adaptation(&id)?;
    Ok(Json(Proposals {
        proposals: engine.proposal_views(&id)?,
    }))
}

async fn feedback(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
    body: Result<Json<FeedbackDecision>, JsonRejection>,
) -> ApiResult<FuiResponse> {
    let Json(decision) = body?;
    let fui = lock(&engine)?.apply_feedback(&id, &decision)?;
    Ok(Json(FuiResponse { fui }))
}

async fn weights(
    State(engine): State<SharedEngine>,
    Path(id): Path<String>,
    body: Result<Json<ScoreWeights>, JsonRejection>,
) -> ApiResult<WeightsResponse> {
    let Json(w) = body?;
    let weights = lock(&engine)?.set_weights(&id, w)?;
    Ok(Json(WeightsResponse { weights }))
}

async fn alternatives(
    State(engine): State<SharedEngine>,
    Path(gid): Path<String>,
    query: Result<Query<AlternativesQuery>, QueryRejection>,
) -> ApiResult<Vec<GroupAlternative>> {
    let Query(q) = query?;
    Ok(Json(lock(&engine)?.list_group_alternatives(
        &gid,
        &q.model,
        q.user.as_deref(),
    )))
}

/// Serves until `shutdown` resolves, then closes every live session so what they logged
/// reaches the store.
pub async fn serve(
    listener: TcpListener,
    engine: SharedEngine,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(engine.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    let mut engine = engine
        .lock()
        .map_err(|_| std::io::Error::other("engine state poisoned"))?;
    engine
        .drain()
        .map_err(|e| std::io::Error::other(e.to_string()))
}
