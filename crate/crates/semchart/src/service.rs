//! HTTP session service.
//!
//! | method | path                   | body                    |
//! |--------|------------------------|-------------------------|
//! | POST   | `/sessions`            | optional `{config}`     |
//! | GET    | `/sessions/{id}`       |                         |
//! | POST   | `/sessions/{id}/icons` | `{ids: [..]}`           |
//! | DELETE | `/sessions/{id}/icons` | `{positions: [..]}`     |
//! | GET    | `/lexicon`             |                         |
//! | GET    | `/health`              |                         |
//!
//! Session responses carry the session id and timestamps next to the fields
//! of a [`ParseReport`]. Errors are `{code, message, field}`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use semchart_core::chart::{ParseError, ParserConfig, ParserState};
use semchart_core::lexicon::Lexicon;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use uuid::Uuid;

use crate::lexicon_io::feature_set_to_json;
use crate::report::{elapsed_ms, ConfigSpec, ParseReport};

pub const DEFAULT_IDLE_EXPIRY: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>, field: Option<String>) -> Self {
        ApiError { status, code, message: message.into(), field }
    }

    fn session_not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "session_not_found", format!("session not found: {id}"), Some("id".into()))
    }

    fn from_parse(e: ParseError, ids: &[String]) -> Self {
        let unprocessable = StatusCode::UNPROCESSABLE_ENTITY;
        match &e {
            ParseError::UnknownIcon(id) => {
                let field = ids.iter().position(|x| x == id).map_or("ids".into(), |i| format!("ids[{i}]"));
                ApiError::new(unprocessable, "unknown_icon", e.to_string(), Some(field))
            }
            ParseError::SequenceTooLong { .. } => {
                ApiError::new(unprocessable, "sequence_too_long", e.to_string(), Some("ids".into()))
            }
            ParseError::UnknownPositions(_) | ParseError::UnknownInstances(_) => {
                ApiError::new(unprocessable, "unknown_position", e.to_string(), Some("positions".into()))
            }
            ParseError::InvalidConfig(_) => {
                ApiError::new(unprocessable, "invalid_config", e.to_string(), Some("config".into()))
            }
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string(), None),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

/// A session as returned by every session endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub created_ms: u64,
    pub modified_ms: u64,
    #[serde(flatten)]
    pub report: ParseReport,
}

struct Session {
    /// Mutations hold this for their whole duration; waiters are served in
    /// arrival order.
    parser: tokio::sync::Mutex<ParserState>,
    /// The last completed parse, readable while a mutation is in flight.
    view: RwLock<SessionView>,
    touched: Mutex<Instant>,
}

impl Session {
    fn touch(&self) {
        *self.touched.lock().expect("touch lock") = Instant::now();
    }

    fn idle_for(&self) -> Duration {
        self.touched.lock().expect("touch lock").elapsed()
    }

    fn view(&self) -> SessionView {
        self.view.read().expect("view lock").clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ServiceOptions {
    pub idle_expiry: Duration,
    /// Configuration for sessions created without one.
    pub default_config: ParserConfig,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        ServiceOptions { idle_expiry: DEFAULT_IDLE_EXPIRY, default_config: ParserConfig::default() }
    }
}

#[derive(Clone)]
pub struct AppState {
    lexicon: Arc<Lexicon>,
    sessions: Arc<Mutex<HashMap<Uuid, Arc<Session>>>>,
    options: ServiceOptions,
}

fn unix_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

impl AppState {
    pub fn new(lexicon: Arc<Lexicon>, options: ServiceOptions) -> Self {
        AppState { lexicon, sessions: Arc::default(), options }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map").len()
    }

    /// Drops sessions idle for at least the expiry; returns how many.
    pub fn purge_expired(&self) -> usize {
        let idle = self.options.idle_expiry;
        let mut sessions = self.sessions.lock().expect("session map");
        let before = sessions.len();
        sessions.retain(|_, s| s.idle_for() < idle);
        before - sessions.len()
    }

    fn session(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let key = Uuid::parse_str(id).map_err(|_| ApiError::session_not_found(id))?;
        let mut sessions = self.sessions.lock().expect("session map");
        let session = sessions.get(&key).cloned().ok_or_else(|| ApiError::session_not_found(id))?;
        if session.idle_for() >= self.options.idle_expiry {
            sessions.remove(&key);
            return Err(ApiError::session_not_found(id));
        }
        session.touch();
        Ok(session)
    }
}

fn parse_body<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = (path != "." && path != "?").then_some(path);
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_body", e.into_inner().to_string(), field)
    })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    config: Option<ConfigSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AppendBody {
    ids: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RemoveBody {
    positions: Vec<usize>,
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let body: CreateBody = parse_body(&body)?;
    let config = match body.config {
        Some(spec) => spec.to_config().map_err(|(field, message)| {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_config", message, Some(format!("config.{field}")))
        })?,
        None => app.options.default_config,
    };
    let mut parser = ParserState::new(Arc::clone(&app.lexicon), config).map_err(|e| ApiError::from_parse(e, &[]))?;
    let start = Instant::now();
    parser.parse_from_scratch::<&str>(&[]).map_err(|e| ApiError::from_parse(e, &[]))?;
    let report = ParseReport::from_state(&parser, elapsed_ms(start)).map_err(|e| ApiError::from_parse(e, &[]))?;

    let id = Uuid::new_v4();
    let now = unix_ms();
    let view = SessionView { session_id: id.to_string(), created_ms: now, modified_ms: now, report };
    let session = Session {
        parser: tokio::sync::Mutex::new(parser),
        view: RwLock::new(view.clone()),
        touched: Mutex::new(Instant::now()),
    };
    app.sessions.lock().expect("session map").insert(id, Arc::new(session));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(app.session(&id)?.view()))
}

/// Applies one mutation under the session's parser lock and publishes the
/// resulting view.
async fn mutate(
    app: &AppState,
    id: &str,
    ids_for_errors: &[String],
    edit: impl FnOnce(&mut ParserState) -> Result<(), ParseError>,
) -> Result<Json<SessionView>, ApiError> {
    let session = app.session(id)?;
    let mut parser = session.parser.lock().await;
    let start = Instant::now();
    edit(&mut parser).map_err(|e| ApiError::from_parse(e, ids_for_errors))?;
    let report = ParseReport::from_state(&parser, elapsed_ms(start)).map_err(|e| ApiError::from_parse(e, &[]))?;
    let view = {
        let mut view = session.view.write().expect("view lock");
        view.modified_ms = unix_ms();
        view.report = report;
        view.clone()
    };
    session.touch();
    Ok(Json(view))
}

async fn append_icons(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    let body: AppendBody = parse_body(&body)?;
    mutate(&app, &id, &body.ids, |p| p.add_icons(&body.ids).map(drop)).await
}

async fn remove_icons(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    let body: RemoveBody = parse_body(&body)?;
    mutate(&app, &id, &[], |p| p.remove_positions(&body.positions).map(drop)).await
}

async fn lexicon(State(app): State<AppState>) -> Json<Value> {
    let icons: Vec<Value> = app
        .lexicon
        .entries()
        .map(|e| {
            let cases: Vec<Value> = e
                .case_structure
                .iter()
                .map(|c| json!({ "case": c.case_type, "select": feature_set_to_json(&c.selectional) }))
                .collect();
            json!({
                "id": e.id,
                "gloss": e.gloss,
                "predicative": e.is_predicative(),
                "valency": e.valency(),
                "intrinsic": feature_set_to_json(&e.intrinsic),
                "cases": cases,
            })
        })
        .collect();
    Json(json!({ "ontology_note": app.lexicon.ontology_note, "icons": icons }))
}

async fn health(State(app): State<AppState>) -> Json<Value> {
    Json(json!({ "status": "ok", "sessions": app.session_count() }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/icons", post(append_icons).delete(remove_icons))
        .route("/lexicon", get(lexicon))
        .route("/health", get(health))
        .with_state(state)
}

/// Serves until interrupted, purging idle sessions in the background.
pub async fn serve(lexicon: Arc<Lexicon>, addr: SocketAddr, options: ServiceOptions) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let state = AppState::new(lexicon, options);
    let sweeper = {
        let state = state.clone();
        let period = options.idle_expiry.clamp(Duration::from_secs(1), Duration::from_secs(60));
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                state.purge_expired();
            }
        })
    };
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    sweeper.abort();
    result
}
