//! HTTP/JSON judging API.
//!
//! | method | path                     | body                                   |
//! |--------|--------------------------|----------------------------------------|
//! | GET    | `/api/topics`            | `[TopicSummary]`                       |
//! | GET    | `/api/pools/{topic}`     | `PoolView`                             |
//! | GET    | `/api/docs/{doc}/clean`  | cleaned page, `text/html`              |
//! | POST   | `/api/judgments`         | `JudgmentRequest` in, `JudgmentEvent` out |
//! | GET    | `/api/export/qrels`      | the caller's qrels, `text/plain`       |
//!
//! Every `/api` request carries `Authorization: Bearer <token>`. Errors are
//! `{"error": "..."}` with 401, 403, 404 or 422. Anything outside `/api` is
//! served from the UI bundle directory when one is configured.
//!
//! Pool listings expose document ids, presentation order and the caller's
//! own grades only. Provenance never leaves the server.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::{mpsc, Arc, RwLock};

use axum::extract::{FromRequestParts, Path, State};
use axum::http::header::{AUTHORIZATION, CONTENT_SECURITY_POLICY, CONTENT_TYPE};
use axum::http::request::Parts;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::{Deserialize, Serialize};
use tokio::sync::oneshot;
use tower_http::services::ServeDir;
use trelkit::model::{parse_manifest, parse_topics, write_qrels, Grade, Manifest, Qrels, Topic};
use trelkit::pooling::{parse_pools, Pool};

use crate::clean::{clean_document, wrap_page};
use crate::config::{Assignments, ServiceConfig};
use crate::error::{JudgeError, Result};
use crate::log::{read_log, replay, JudgmentEvent, LogWriter};

/// Set on document responses whose bytes were not valid UTF-8.
pub const LOSSY_HEADER: &str = "x-trelkit-lossy-decode";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: String,
    pub title: String,
    pub levels: BTreeMap<u8, String>,
    pub judged: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolDoc {
    pub doc_id: String,
    pub grade: Option<Grade>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolView {
    pub topic_id: String,
    pub judged: usize,
    pub total: usize,
    /// In presentation order.
    pub docs: Vec<PoolDoc>,
}

/// Grade is taken as a plain integer so that out-of-range values get a
/// validation error rather than a parse failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRequest {
    pub topic_id: String,
    pub doc_id: String,
    pub grade: i64,
}

type Key = (String, String, String);
type Grades = Arc<RwLock<BTreeMap<Key, Grade>>>;
type Append = (JudgmentRequest, String, oneshot::Sender<Result<JudgmentEvent, String>>);

pub struct JudgeState {
    topics: BTreeMap<String, Topic>,
    pools: BTreeMap<String, Pool>,
    manifest: Manifest,
    docs_root: PathBuf,
    tokens: HashMap<String, String>,
    assigned: BTreeMap<String, BTreeSet<String>>,
    /// Pool topics each document belongs to.
    doc_topics: HashMap<String, BTreeSet<String>>,
    grades: Grades,
    appender: mpsc::Sender<Append>,
    ui_dir: Option<PathBuf>,
}

impl JudgeState {
    pub fn load(config: &ServiceConfig) -> Result<Arc<Self>> {
        let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| JudgeError::config(p, e));
        let topics = parse_topics(&read(&config.topics)?)?;
        let manifest = parse_manifest(&read(&config.manifest)?)?;
        let mut pools = Vec::new();
        for p in &config.pools {
            pools.extend(parse_pools(&read(p)?)?);
        }
        let assignments = Assignments::load(&config.assignments)?;
        Self::new(topics, manifest, pools, assignments, config.docs_root.clone(), &config.log, config.ui_dir.clone())
    }

    pub fn new(
        topics: Vec<Topic>,
        manifest: Manifest,
        pools: Vec<Pool>,
        assignments: Assignments,
        docs_root: PathBuf,
        log_path: &std::path::Path,
        ui_dir: Option<PathBuf>,
    ) -> Result<Arc<Self>> {
        let invalid = |m: String| JudgeError::Core(trelkit::Error::Validation(m));
        let topics: BTreeMap<String, Topic> = topics.into_iter().map(|t| (t.id.clone(), t)).collect();
        let mut by_topic = BTreeMap::new();
        for pool in pools {
            if !topics.contains_key(&pool.topic_id) {
                return Err(invalid(format!("pool for unknown topic {}", pool.topic_id)));
            }
            if let Some(doc) = pool.doc_ids().find(|d| !manifest.contains(d)) {
                return Err(invalid(format!("pool {} lists {doc}, which is not in the manifest", pool.topic_id)));
            }
            let id = pool.topic_id.clone();
            if by_topic.insert(id.clone(), pool).is_some() {
                return Err(invalid(format!("two pools for topic {id}")));
            }
        }
        for a in &assignments.assessors {
            if let Some(t) = a.topics.iter().find(|t| !by_topic.contains_key(*t)) {
                return Err(invalid(format!("assessor {} is assigned {t}, which has no pool", a.id)));
            }
        }
        let required = by_topic.keys().filter(|t| !topics[*t].is_noise).map(String::as_str);
        let unassigned = assignments.unassigned(required);
        if !unassigned.is_empty() {
            return Err(invalid(format!("no assessor for topics {}", unassigned.join(", "))));
        }

        let mut doc_topics: HashMap<String, BTreeSet<String>> = HashMap::new();
        for pool in by_topic.values() {
            for d in pool.doc_ids() {
                doc_topics.entry(d.to_string()).or_default().insert(pool.topic_id.clone());
            }
        }

        let grades: Grades = Arc::new(RwLock::new(replay(&read_log(log_path)?)));
        let writer = LogWriter::open(log_path)?;
        let appender = spawn_appender(writer, Arc::clone(&grades));

        Ok(Arc::new(JudgeState {
            topics,
            pools: by_topic,
            manifest,
            docs_root,
            tokens: assignments.assessors.iter().map(|a| (a.token.clone(), a.id.clone())).collect(),
            assigned: assignments
                .assessors
                .iter()
                .map(|a| (a.id.clone(), a.topics.iter().cloned().collect()))
                .collect(),
            doc_topics,
            grades,
            appender,
            ui_dir,
        }))
    }

    pub fn pool(&self, topic_id: &str) -> Option<&Pool> {
        self.pools.get(topic_id)
    }

    /// Replay of the log so far for one assessor.
    pub fn qrels_for(&self, assessor_id: &str) -> Qrels {
        let grades = self.grades.read().expect("grades lock");
        let mut q = Qrels::new();
        for ((a, t, d), g) in grades.iter() {
            if a == assessor_id {
                q.set(t, d, *g);
            }
        }
        q
    }

    fn grade(&self, assessor: &str, topic: &str, doc: &str) -> Option<Grade> {
        let key = (assessor.to_string(), topic.to_string(), doc.to_string());
        self.grades.read().expect("grades lock").get(&key).copied()
    }

    fn progress(&self, assessor: &str, pool: &Pool) -> usize {
        pool.presentation_order.iter().filter(|d| self.grade(assessor, &pool.topic_id, d).is_some()).count()
    }

    fn is_assigned(&self, assessor: &str, topic: &str) -> bool {
        self.assigned.get(assessor).is_some_and(|t| t.contains(topic))
    }
}

/// All appends go through one thread, so the log is a total order and
/// in-memory grades always equal a replay of it.
fn spawn_appender(mut writer: LogWriter, grades: Grades) -> mpsc::Sender<Append> {
    let (tx, rx) = mpsc::channel::<Append>();
    std::thread::spawn(move || {
        for (req, assessor_id, reply) in rx {
            let event = JudgmentEvent {
                assessor_id,
                topic_id: req.topic_id,
                doc_id: req.doc_id,
                grade: Grade::from_value(req.grade).expect("grade checked by handler"),
                timestamp: Utc::now(),
            };
            let result = match writer.append(&event) {
                Ok(()) => {
                    let key = (event.assessor_id.clone(), event.topic_id.clone(), event.doc_id.clone());
                    grades.write().expect("grades lock").insert(key, event.grade);
                    Ok(event)
                }
                Err(e) => Err(e.to_string()),
            };
            let _ = reply.send(result);
        }
    });
    tx
}

#[derive(Debug)]
pub enum ApiError {
    Unauthorized,
    Forbidden(String),
    NotFound(String),
    Invalid(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::Unauthorized => (StatusCode::UNAUTHORIZED, "missing or unknown bearer token".to_string()),
            ApiError::Forbidden(m) => (StatusCode::FORBIDDEN, m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Invalid(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(serde_json::json!({ "error": message }))).into_response()
    }
}

/// The assessor behind the request's bearer token.
pub struct AssessorId(pub String);

impl FromRequestParts<Arc<JudgeState>> for AssessorId {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Arc<JudgeState>) -> Result<Self, ApiError> {
        let token = parts
            .headers
            .get(AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or(ApiError::Unauthorized)?;
        state.tokens.get(token).map(|id| AssessorId(id.clone())).ok_or(ApiError::Unauthorized)
    }
}

pub fn router(state: Arc<JudgeState>) -> Router {
    let api = Router::new()
        .route("/api/topics", get(list_topics))
        .route("/api/pools/{topic_id}", get(show_pool))
        .route("/api/docs/{doc_id}/clean", get(clean_doc))
        .route("/api/judgments", post(record_judgment))
        .route("/api/export/qrels", get(export));
    let app = match &state.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.with_state(state)
}

pub async fn serve(listener: tokio::net::TcpListener, state: Arc<JudgeState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn list_topics(State(state): State<Arc<JudgeState>>, AssessorId(me): AssessorId) -> Json<Vec<TopicSummary>> {
    let topics = state.assigned.get(&me).into_iter().flatten();
    Json(
        topics
            .map(|t| {
                let pool = &state.pools[t];
                let topic = &state.topics[t];
                TopicSummary {
                    topic_id: t.clone(),
                    title: topic.title.clone(),
                    levels: topic.levels.clone(),
                    judged: state.progress(&me, pool),
                    total: pool.len(),
                }
            })
            .collect(),
    )
}

async fn show_pool(
    State(state): State<Arc<JudgeState>>,
    AssessorId(me): AssessorId,
    Path(topic_id): Path<String>,
) -> Result<Json<PoolView>, ApiError> {
    let pool = state.pools.get(&topic_id).ok_or_else(|| ApiError::NotFound(format!("no pool for topic {topic_id}")))?;
    if !state.is_assigned(&me, &topic_id) {
        return Err(ApiError::Forbidden(format!("topic {topic_id} is not assigned to {me}")));
    }
    let docs: Vec<PoolDoc> = pool
        .presentation_order
        .iter()
        .map(|d| PoolDoc { doc_id: d.clone(), grade: state.grade(&me, &topic_id, d) })
        .collect();
    Ok(Json(PoolView {
        topic_id,
        judged: docs.iter().filter(|d| d.grade.is_some()).count(),
        total: docs.len(),
        docs,
    }))
}

async fn clean_doc(
    State(state): State<Arc<JudgeState>>,
    AssessorId(me): AssessorId,
    Path(doc_id): Path<String>,
) -> Result<Response, ApiError> {
    let entry = state.manifest.get(&doc_id).ok_or_else(|| ApiError::NotFound(format!("unknown document {doc_id}")))?;
    let visible = state.doc_topics.get(&doc_id).is_some_and(|ts| ts.iter().any(|t| state.is_assigned(&me, t)));
    if !visible {
        return Err(ApiError::Forbidden(format!("{doc_id} is not in any pool assigned to {me}")));
    }
    let path = state.docs_root.join(&entry.path);
    let cleaned = tokio::task::spawn_blocking(move || std::fs::read(&path).map(|raw| clean_document(&raw)))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(|e| ApiError::Internal(format!("reading {doc_id}: {e}")))?;
    let mut resp = wrap_page(&doc_id, &cleaned.html).into_response();
    let headers = resp.headers_mut();
    headers.insert(CONTENT_TYPE, HeaderValue::from_static("text/html; charset=utf-8"));
    // the cleaned page needs nothing from anywhere
    headers.insert(CONTENT_SECURITY_POLICY, HeaderValue::from_static("default-src 'none'"));
    if cleaned.lossy {
        headers.insert(LOSSY_HEADER, HeaderValue::from_static("true"));
    }
    Ok(resp)
}

async fn record_judgment(
    State(state): State<Arc<JudgeState>>,
    AssessorId(me): AssessorId,
    Json(req): Json<JudgmentRequest>,
) -> Result<Json<JudgmentEvent>, ApiError> {
    if !state.topics.contains_key(&req.topic_id) {
        return Err(ApiError::NotFound(format!("unknown topic {}", req.topic_id)));
    }
    if !state.manifest.contains(&req.doc_id) {
        return Err(ApiError::NotFound(format!("unknown document {}", req.doc_id)));
    }
    if Grade::from_value(req.grade).is_none() {
        return Err(ApiError::Invalid(format!("grade {} is not one of -1, 0, 1, 2", req.grade)));
    }
    if !state.is_assigned(&me, &req.topic_id) {
        return Err(ApiError::Forbidden(format!("topic {} is not assigned to {me}", req.topic_id)));
    }
    if !state.pools.get(&req.topic_id).is_some_and(|p| p.contains(&req.doc_id)) {
        return Err(ApiError::Forbidden(format!("{} is not in the pool of {}", req.doc_id, req.topic_id)));
    }
    let (tx, rx) = oneshot::channel();
    state.appender.send((req, me, tx)).map_err(|_| ApiError::Internal("judgment log is closed".into()))?;
    let event = rx
        .await
        .map_err(|_| ApiError::Internal("judgment log is closed".into()))?
        .map_err(ApiError::Internal)?;
    Ok(Json(event))
}

async fn export(State(state): State<Arc<JudgeState>>, AssessorId(me): AssessorId) -> Response {
    let text = write_qrels(&state.qrels_for(&me));
    ([(CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response()
}
