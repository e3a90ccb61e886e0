use std::sync::{Arc, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::EngineConfig;
use super::engine::{advisor_from_config, AnalysisReport, CorpusInfo, Engine};
use super::EngineError;
use crate::corpus::CweId;
use crate::entity::EntityError;
use crate::mitigation::{HttpTransport, MitigationError, Suggestion};
use crate::ontology::{BindingSet, OntologyStats};

pub const MAX_K: usize = 100;

pub struct AppState {
    engine: RwLock<Option<Arc<Engine>>>,
    config: EngineConfig,
    /// Injected transport for mitigation requests; a real client otherwise.
    transport: Option<Arc<dyn HttpTransport>>,
}

impl AppState {
    pub fn new(config: EngineConfig, engine: Option<Engine>, transport: Option<Arc<dyn HttpTransport>>) -> Arc<Self> {
        Arc::new(AppState { engine: RwLock::new(engine.map(Arc::new)), config, transport })
    }

    pub fn engine(&self) -> Option<Arc<Engine>> {
        self.engine.read().expect("engine lock").clone()
    }

    /// Swaps in a new engine; requests already holding the old one finish on it.
    pub fn swap(&self, engine: Engine) {
        *self.engine.write().expect("engine lock") = Some(Arc::new(engine));
    }
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), detail: Value::Null }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"code": self.code, "message": self.message, "detail": self.detail}))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", r.body_text())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let msg = e.to_string();
        match e {
            EngineError::Unavailable => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "engine_unavailable", msg),
            EngineError::Entity(EntityError::EmptyQuery) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "empty_query", msg)
            }
            EngineError::Entity(EntityError::ZeroK) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", msg),
            EngineError::Query(q) => ApiError::new(StatusCode::BAD_REQUEST, "query_syntax", msg)
                .with_detail(json!({"line": q.line, "col": q.col})),
            EngineError::Mitigation(m) => mitigation_error(m),
            EngineError::Config(_) | EngineError::Input { .. } | EngineError::Training(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "configuration", msg)
            }
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", msg),
        }
    }
}

fn mitigation_error(e: MitigationError) -> ApiError {
    let msg = e.to_string();
    let retryable = e.is_retryable();
    match e {
        MitigationError::NoCweIds => ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", msg),
        MitigationError::AllFetchesFailed(list) => ApiError::new(StatusCode::BAD_GATEWAY, "upstream", msg)
            .with_detail(json!({"failures": list, "retryable": retryable})),
        MitigationError::Llm { source, prompt } => {
            let (status, code) = match *source {
                MitigationError::Config(_) => (StatusCode::INTERNAL_SERVER_ERROR, "configuration"),
                _ => (StatusCode::BAD_GATEWAY, "upstream"),
            };
            ApiError::new(status, code, msg).with_detail(json!({"prompt": prompt, "retryable": retryable}))
        }
        MitigationError::Config(_) | MitigationError::Template(_) => {
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "configuration", msg)
        }
        _ => ApiError::new(StatusCode::BAD_GATEWAY, "upstream", msg).with_detail(json!({"retryable": retryable})),
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn engine(state: &AppState) -> Result<Arc<Engine>, ApiError> {
    state.engine().ok_or_else(|| EngineError::Unavailable.into())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeRequest {
    pub description: String,
    pub k: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigateRequest {
    pub description: String,
    pub cwe_ids: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub query_text: String,
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

async fn analyze(
    State(state): State<Arc<AppState>>,
    body: Result<Json<AnalyzeRequest>, JsonRejection>,
) -> ApiResult<AnalysisReport> {
    let Json(req) = body?;
    if let Some(k) = req.k {
        if k == 0 || k > MAX_K {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", format!("k must be in 1..={MAX_K}")));
        }
    }
    let engine = engine(&state)?;
    Ok(Json(engine.analyze(&req.description, req.k)?))
}

async fn mitigate(
    State(state): State<Arc<AppState>>,
    body: Result<Json<MitigateRequest>, JsonRejection>,
) -> ApiResult<Suggestion> {
    let Json(req) = body?;
    let mut ids = Vec::with_capacity(req.cwe_ids.len());
    for raw in &req.cwe_ids {
        let id = CweId::parse_lenient(raw)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))?;
        ids.push(id);
    }
    let config = state.config.clone();
    let transport = state.transport.clone();
    let result = tokio::task::spawn_blocking(move || {
        let advisor = advisor_from_config(&config, transport)?;
        advisor.suggest(&ids, &req.description).map_err(EngineError::Mitigation)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    Ok(Json(result?))
}

async fn ontology_query(
    State(state): State<Arc<AppState>>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> ApiResult<BindingSet> {
    let Json(req) = body?;
    Ok(Json(engine(&state)?.query(&req.query_text)?))
}

async fn ontology_stats(State(state): State<Arc<AppState>>) -> ApiResult<OntologyStats> {
    Ok(Json(engine(&state)?.ontology_stats()))
}

async fn corpus_info(State(state): State<Arc<AppState>>) -> ApiResult<CorpusInfo> {
    Ok(Json(engine(&state)?.corpus_info()))
}

async fn reload(State(state): State<Arc<AppState>>) -> ApiResult<CorpusInfo> {
    let config = state.config.clone();
    let engine = tokio::task::spawn_blocking(move || Engine::load(&config))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let info = engine.corpus_info();
    state.swap(engine);
    Ok(Json(info))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/analyze", post(analyze))
        .route("/api/mitigate", post(mitigate))
        .route("/api/ontology/query", post(ontology_query))
        .route("/api/ontology/stats", get(ontology_stats))
        .route("/api/corpus/info", get(corpus_info))
        .route("/api/reload", post(reload))
        .fallback(not_found)
        .with_state(state)
}

/// Loads the engine and serves until ctrl-c.
pub async fn serve(config: EngineConfig) -> Result<(), EngineError> {
    let cfg = config.clone();
    let engine = tokio::task::spawn_blocking(move || Engine::load(&cfg))
        .await
        .map_err(|e| EngineError::Internal(e.to_string()))??;
    let state = AppState::new(config.clone(), Some(engine), None);
    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .map_err(|e| EngineError::Config(format!("cannot bind {}: {e}", config.bind)))?;
    log::info!("listening on {}", config.bind);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| EngineError::Internal(e.to_string()))
}
