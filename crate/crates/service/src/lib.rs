//! HTTP service for headline adjudication and sentence alignment.
//!
//! | Method | Path | |
//! |---|---|---|
//! | GET | `/tasks/next?annotator=` | next candidate set with unjudged candidates, or 204 |
//! | GET | `/tasks?annotator=` | task counts |
//! | POST | `/verdicts` | record one verdict (201, 409 on repeat, 422 on bad fields) |
//! | GET | `/verdicts` | all recorded verdicts |
//! | GET | `/sessions` | session ids and versions |
//! | GET | `/sessions/{id}` | segments, links and version |
//! | POST | `/sessions/{id}/links` | replace the link list (409 on stale version, 422 on bad index) |
//! | POST | `/sessions/{id}/segments` | merge, split or edit a segment |
//! | GET | `/export` | accepted pairs as pair TSV |
//!
//! Error bodies are `{"error": <message>, ...}` with extra fields naming
//! the offending input.

pub mod store;

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use paramine_core::alignment::{Link, ValidationConfig, Verdict};
use paramine_core::ArticleRecord;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::RwLock;

pub use store::{Event, SegmentOp, Session, SessionError, Side, Store, StoreError};

pub type Shared = Arc<RwLock<Store>>;

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn field(field: &str, message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, body: json!({ "error": message.into(), "field": field }) }
    }

    fn with(mut self, key: &str, value: Value) -> ApiError {
        self.body[key] = value;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        log::error!("{e}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> ApiError {
        let base = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string());
        match e {
            SessionError::LinkIndex { link, side, index, .. } => {
                base.with("link", json!(link)).with("side", json!(side)).with("index", json!(index))
            }
            SessionError::EmptyLink { link, side } => base.with("link", json!(link)).with("side", json!(side)),
            SessionError::SegmentIndex { side, index, .. } => base.with("side", json!(side)).with("index", json!(index)),
            SessionError::BadOp(_) => base,
        }
    }
}

pub fn router(store: Shared) -> Router {
    Router::new()
        .route("/tasks", get(task_counts))
        .route("/tasks/next", get(next_task))
        .route("/verdicts", post(post_verdict).get(list_verdicts))
        .route("/sessions", get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/links", post(post_links))
        .route("/sessions/{id}/segments", post(post_segments))
        .route("/export", get(export))
        .with_state(store)
}

/// Opens the data directory and serves until interrupted.
pub async fn serve(addr: SocketAddr, data_dir: &Path, validation: ValidationConfig) -> Result<(), Box<dyn std::error::Error>> {
    let store = Store::open(data_dir, validation)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(RwLock::new(store))))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[derive(Deserialize)]
struct AnnotatorQuery {
    #[serde(default = "default_annotator")]
    annotator: String,
}

fn default_annotator() -> String {
    "anonymous".into()
}

fn article_view(a: Option<&ArticleRecord>, id: &str) -> Value {
    match a {
        Some(a) => json!({
            "id": a.id,
            "language": a.language,
            "title": a.title,
            "lead": a.lead,
            "content": a.content,
            "date": a.date,
            "images": a.images,
        }),
        None => json!({ "id": id }),
    }
}

async fn task_counts(State(store): State<Shared>, Query(q): Query<AnnotatorQuery>) -> Json<Value> {
    let store = store.read().await;
    let pending = store.pending_tasks(&q.annotator).len();
    Json(json!({ "total": store.task_count(), "pending": pending, "completed": store.task_count() - pending }))
}

async fn next_task(State(store): State<Shared>, Query(q): Query<AnnotatorQuery>) -> Response {
    let store = store.read().await;
    let tasks = store.pending_tasks(&q.annotator);
    let Some(task) = tasks.first() else {
        return StatusCode::NO_CONTENT.into_response();
    };
    let set = task.set;
    let candidates: Vec<Value> = task
        .pending
        .iter()
        .map(|&i| {
            let c = &set.candidates[i];
            json!({
                "rank": i + 1,
                "target_id": c.target_id,
                "score": c.score,
                "matched_via": c.matched_via,
                "article": article_view(store.article(&c.target_id), &c.target_id),
            })
        })
        .collect();
    Json(json!({
        "source": article_view(store.article(&set.source_id), &set.source_id),
        "source_language": set.source_language,
        "target_language": set.target_language,
        "candidates": candidates,
        "verdicts": Verdict::ALL,
        "pending_tasks": tasks.len(),
    }))
    .into_response()
}

fn string_field(body: &Value, field: &str, required: bool) -> Result<Option<String>, ApiError> {
    match body.get(field) {
        Some(Value::String(s)) if !s.trim().is_empty() => Ok(Some(s.clone())),
        None | Some(Value::Null) if !required => Ok(None),
        Some(_) => Err(ApiError::field(field, format!("`{field}` must be a non-empty string"))),
        None => Err(ApiError::field(field, format!("`{field}` is required"))),
    }
}

async fn post_verdict(State(store): State<Shared>, body: Option<Json<Value>>) -> Result<Response, ApiError> {
    let Some(Json(body)) = body else {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "body must be a JSON object"));
    };
    let source_id = string_field(&body, "source_id", true)?.unwrap_or_default();
    let target_id = string_field(&body, "target_id", true)?.unwrap_or_default();
    let annotator = string_field(&body, "annotator", true)?.unwrap_or_default();
    let verdict: Verdict = string_field(&body, "verdict", true)?
        .unwrap_or_default()
        .parse()
        .map_err(|e: paramine_core::alignment::UnknownVerdict| ApiError::field("verdict", e.to_string()))?;
    let timestamp = string_field(&body, "timestamp", false)?
        .map(|t| DateTime::parse_from_rfc3339(&t).map(|d| d.with_timezone(&Utc)))
        .transpose()
        .map_err(|_| ApiError::field("timestamp", "`timestamp` must be RFC 3339"))?;

    let mut store = store.write().await;
    if store.find_candidate(&source_id, &target_id).is_none() {
        return Err(ApiError::field("target_id", format!("{source_id} / {target_id} is not a candidate pair")));
    }
    if store.is_judged(&annotator, &source_id, &target_id) {
        return Err(ApiError::new(StatusCode::CONFLICT, format!("{annotator} already judged {source_id} / {target_id}")));
    }
    let annotation = store::annotation(source_id, target_id, verdict, annotator, timestamp, &store);
    store.commit(Event::Verdict { annotation: annotation.clone() })?;
    Ok((StatusCode::CREATED, Json(annotation)).into_response())
}

async fn list_verdicts(State(store): State<Shared>) -> Response {
    Json(store.read().await.annotations().to_vec()).into_response()
}

async fn list_sessions(State(store): State<Shared>) -> Json<Value> {
    let store = store.read().await;
    Json(Value::Array(store.sessions().map(|s| json!({ "id": s.id, "version": s.version })).collect()))
}

async fn get_session(State(store): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let store = store.read().await;
    let s = store.session(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`")))?;
    let segments = |segs: &[store::Segment], src: bool| -> Vec<Value> {
        segs.iter()
            .map(|seg| {
                let entry = &s.articles[seg.article];
                let article = if src { &entry.src_id } else { &entry.tgt_id };
                json!({ "text": seg.text, "article": article, "parts": seg.parts, "edited": seg.edited })
            })
            .collect()
    };
    let (_, rejected) = s.pairs(&store.validation);
    Ok(Json(json!({
        "id": s.id,
        "version": s.version,
        "src_language": s.src_language,
        "tgt_language": s.tgt_language,
        "src_segments": segments(&s.src, true),
        "tgt_segments": segments(&s.tgt, false),
        "links": s.links,
        "rejected_links": rejected,
    })))
}

#[derive(Deserialize)]
struct LinksBody {
    version: u64,
    links: Vec<Link>,
}

#[derive(Deserialize)]
struct SegmentsBody {
    version: u64,
    #[serde(flatten)]
    op: SegmentOp,
}

fn parse_body<T: serde::de::DeserializeOwned>(body: Option<Json<Value>>) -> Result<T, ApiError> {
    let Json(value) = body.ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "body must be JSON"))?;
    serde_json::from_value(value).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))
}

fn check_version(s: &Session, version: u64) -> Result<(), ApiError> {
    if s.version != version {
        return Err(ApiError::new(StatusCode::CONFLICT, format!("session is at version {}, request was for {version}", s.version))
            .with("version", json!(s.version)));
    }
    Ok(())
}

async fn post_links(
    State(store): State<Shared>,
    UrlPath(id): UrlPath<String>,
    body: Option<Json<Value>>,
) -> Result<Json<Value>, ApiError> {
    let body: LinksBody = parse_body(body)?;
    let mut store = store.write().await;
    let s = store.session(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`")))?;
    check_version(s, body.version)?;
    s.check_links(&body.links)?;
    store.commit(Event::Links { session: id.clone(), links: body.links })?;
    Ok(Json(json!({ "version": store.session(&id).map(|s| s.version) })))
}

async fn post_segments(
    State(store): State<Shared>,
    UrlPath(id): UrlPath<String>,
    body: Option<Json<Value>>,
) -> Result<Json<Value>, ApiError> {
    let body: SegmentsBody = parse_body(body)?;
    let mut store = store.write().await;
    let s = store.session(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`")))?;
    check_version(s, body.version)?;
    s.check_op(&body.op)?;
    store.commit(Event::Segments { session: id.clone(), op: body.op })?;
    Ok(Json(json!({ "version": store.session(&id).map(|s| s.version) })))
}

async fn export(State(store): State<Shared>) -> Result<Response, ApiError> {
    let (tsv, rejected) = store.write().await.export()?;
    Ok((
        [(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8".to_string()), (header::HeaderName::from_static("x-rejected-links"), rejected.to_string())],
        tsv,
    )
        .into_response())
}
