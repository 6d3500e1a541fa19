//! JSON API over HTTP.
//!
//! `POST /api/synthesize` and `POST /api/eval` take tables as CSV text keyed
//! by table id. Synthesis reports are rendered exactly as `synth --json`
//! prints them.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use provsynth_core::eval::{eval, eval_prov};
use provsynth_core::synth::{synthesize, SynthConfig};
use provsynth_core::{Database, DemoGrid, Error, Func, Query, Table, Value};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::cors::CorsLayer;

/// Longest synthesis a single request may run, in seconds.
pub const MAX_TIMEOUT: f64 = 600.0;

#[derive(Clone)]
pub struct AppState {
    workers: Arc<Semaphore>,
}

impl AppState {
    pub fn new(workers: usize) -> AppState {
        AppState {
            workers: Arc::new(Semaphore::new(workers)),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeRequest {
    pub tables: BTreeMap<String, String>,
    pub demo: DemoGrid,
    #[serde(default)]
    pub config: SynthConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRequest {
    pub tables: BTreeMap<String, String>,
    pub query: Query,
    /// Return provenance expressions instead of values.
    #[serde(default)]
    pub prov: bool,
}

#[derive(Debug, Serialize)]
pub struct TableJson<T> {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<T>>,
}

#[derive(Debug, Serialize)]
pub struct FunctionJson {
    pub name: &'static str,
    pub commutative: bool,
    pub aggregate: bool,
    pub analytic: bool,
    pub arithmetic: bool,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    fn unresolvable(message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> ApiError {
        match e {
            Error::UnknownTable(_) | Error::BadRef(_) | Error::BadColumn { .. } => ApiError::unresolvable(e.to_string()),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> ApiError {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

fn json_text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn database(tables: &BTreeMap<String, String>) -> Result<Database, ApiError> {
    if tables.is_empty() {
        return Err(ApiError::bad_request("no tables"));
    }
    let mut db = Database::new();
    for (id, csv) in tables {
        db.insert(Table::parse_csv(id.as_str(), csv).map_err(|e| ApiError::bad_request(format!("table {id}: {e}")))?);
    }
    Ok(db)
}

async fn synthesize_handler(
    State(state): State<AppState>,
    body: Result<Json<SynthesizeRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(req) = body?;
    req.demo.validate()?;
    let db = database(&req.tables)?;
    req.demo.check_refs(&db)?;
    let mut config = req.config;
    config.timeout = config.timeout.min(MAX_TIMEOUT);
    config.validate()?;
    let _permit = state.workers.acquire_owned().await.expect("the semaphore is never closed");
    let demo = req.demo;
    let report = tokio::task::spawn_blocking(move || synthesize(&db, &demo, &config))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: e.to_string(),
        })??;
    let status = if report.timed_out {
        StatusCode::GATEWAY_TIMEOUT
    } else {
        StatusCode::OK
    };
    Ok(json_text(status, report.to_json()))
}

async fn eval_handler(body: Result<Json<EvalRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    let db = database(&req.tables)?;
    req.query.check_scope(&db)?;
    if !req.query.is_concrete() {
        return Err(ApiError::bad_request("query has holes"));
    }
    if req.prov {
        let t = eval_prov(&req.query, &db)?;
        let rows = t.rows.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
        Ok(Json(TableJson { columns: t.columns, rows }).into_response())
    } else {
        let t = eval(&req.query, &db)?;
        Ok(Json(TableJson::<Value> {
            columns: t.columns,
            rows: t.rows,
        })
        .into_response())
    }
}

async fn functions_handler() -> Json<Vec<FunctionJson>> {
    Json(
        Func::ALL
            .into_iter()
            .map(|f| FunctionJson {
                name: f.name(),
                commutative: f.is_commutative(),
                aggregate: f.is_aggregate(),
                analytic: f.is_analytic(),
                arithmetic: f.is_arithmetic(),
            })
            .collect(),
    )
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/synthesize", post(synthesize_handler))
        .route("/api/eval", post(eval_handler))
        .route("/api/functions", get(functions_handler))
        .route("/healthz", get(healthz))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(addr: &str, workers: usize) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(workers))).await?;
    Ok(())
}
