use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use semchart::report::{Engine, ParseReport};
use semchart::resolve_lexicon;
use semchart::service::{router, AppState, ServiceOptions, SessionView};
use semchart_core::chart::ParserConfig;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app_with(options: ServiceOptions) -> (Router, AppState) {
    let state = AppState::new(Arc::new(resolve_lexicon("demo").unwrap()), options);
    (router(state.clone()), state)
}

fn app() -> Router {
    app_with(ServiceOptions::default()).0
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Router, body: Option<Value>) -> String {
    let (status, view) = call(app, Method::POST, "/sessions", body).await;
    assert_eq!(status, StatusCode::CREATED, "{view}");
    view["session_id"].as_str().unwrap().to_string()
}

async fn append(app: &Router, id: &str, ids: &[&str]) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/sessions/{id}/icons"), Some(json!({ "ids": ids }))).await
}

fn view(v: Value) -> SessionView {
    serde_json::from_value(v).unwrap()
}

fn fresh(ids: &[&str], config: &ParserConfig) -> ParseReport {
    let lex = Arc::new(resolve_lexicon("demo").unwrap());
    ParseReport::run(&lex, ids, config, Engine::Chart).unwrap()
}

fn same_ranking(a: &ParseReport, b: &ParseReport) {
    a.agrees_with(b, usize::MAX, 1e-9).unwrap();
    assert_eq!(a.interpretations.len(), b.interpretations.len());
    assert_eq!(a.sequence, b.sequence);
}

#[tokio::test]
async fn append_then_read_matches_cli() {
    let app = app();
    let id = create(&app, None).await;
    let (status, body) = append(&app, &id, &["cat", "drink", "milk"]).await;
    assert_eq!(status, StatusCode::OK);
    let appended = view(body);

    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let read = view(body);
    assert_eq!(read, appended);
    assert_eq!(read.session_id, id);

    let report = &read.report;
    assert_eq!(report.headline(report.best().unwrap()), "drink(agent=cat, object=milk) score=1.0");
    let mut out = Vec::new();
    let argv = ["semchart", "parse", "--icons", "cat,drink,milk"];
    assert_eq!(semchart::cli::run(argv, std::io::empty(), &mut out, &mut Vec::new()), 0);
    let cli_top = String::from_utf8(out).unwrap().lines().next().unwrap().to_string();
    assert_eq!(report.headline(report.best().unwrap()), cli_top);
    same_ranking(report, &fresh(&["cat", "drink", "milk"], &ParserConfig::default()));

    let slots = &report.best().unwrap().assignments[0].slots;
    assert_eq!(slots.iter().map(|s| s.weighted.unwrap()).sum::<f64>(), 1.0);
}

#[tokio::test]
async fn deletion_matches_a_fresh_parse() {
    let app = app();
    let config = json!({ "top_k": null, "threshold": 0.0, "gamma": 0.6 });
    let id = create(&app, Some(json!({ "config": config }))).await;
    append(&app, &id, &["boy", "eat", "cake", "mummy", "drink"]).await;
    append(&app, &id, &["juice"]).await;
    let (status, body) =
        call(&app, Method::DELETE, &format!("/sessions/{id}/icons"), Some(json!({ "positions": [1, 4] }))).await;
    assert_eq!(status, StatusCode::OK);
    let expected_config = ParserConfig {
        top_k_assignments: usize::MAX,
        pair_threshold: 0.0,
        fading: semchart_core::compatibility::FadingConfig::new(0.6).unwrap(),
        ..ParserConfig::default()
    };
    same_ranking(&view(body).report, &fresh(&["eat", "cake", "drink", "juice"], &expected_config));
}

#[tokio::test]
async fn structured_errors() {
    let app = app();
    let id = create(&app, None).await;

    let (status, body) = append(&app, &id, &["cat", "unicorn"]).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "unknown_icon");
    assert_eq!(body["field"], "ids[1]");
    assert!(body["message"].as_str().unwrap().contains("unicorn"));

    let (_, body) = append(&app, &id, &["cat"; 21]).await;
    assert_eq!(body["code"], "sequence_too_long");

    let uri = format!("/sessions/{id}/icons");
    let (status, body) = call(&app, Method::DELETE, &uri, Some(json!({ "positions": [99] }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!((body["code"].as_str(), body["field"].as_str()), (Some("unknown_position"), Some("positions")));

    let (status, body) = call(&app, Method::POST, &uri, Some(json!({ "ids": "cat" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!((body["code"].as_str(), body["field"].as_str()), (Some("invalid_body"), Some("ids")));

    let (status, body) = call(&app, Method::POST, "/sessions", Some(json!({ "config": { "gamma": 2.0 } }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["field"], "config.gamma");

    let (status, body) = call(&app, Method::GET, "/sessions/not-a-session", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "session_not_found");

    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert!(view(body).report.sequence.is_empty(), "failed edits leave the session unchanged");
}

#[tokio::test]
async fn idle_sessions_expire() {
    let (app, state) = app_with(ServiceOptions { idle_expiry: Duration::from_millis(30), ..Default::default() });
    let id = create(&app, None).await;
    assert_eq!(call(&app, Method::GET, &format!("/sessions/{id}"), None).await.0, StatusCode::OK);
    tokio::time::sleep(Duration::from_millis(60)).await;
    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "session_not_found");

    create(&app, None).await;
    tokio::time::sleep(Duration::from_millis(60)).await;
    assert_eq!(state.purge_expired(), 1);
    assert_eq!(state.session_count(), 0);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = app();
    let a = create(&app, None).await;
    let b = create(&app, Some(json!({ "config": { "strict_fill": true } }))).await;
    append(&app, &a, &["cat", "drink", "milk"]).await;
    append(&app, &b, &["daddy", "write"]).await;
    let (_, body) = call(&app, Method::GET, &format!("/sessions/{a}"), None).await;
    same_ranking(&view(body).report, &fresh(&["cat", "drink", "milk"], &ParserConfig::default()));
    let (_, body) = call(&app, Method::GET, &format!("/sessions/{b}"), None).await;
    let strict = ParserConfig { strict_fill: true, ..ParserConfig::default() };
    same_ranking(&view(body).report, &fresh(&["daddy", "write"], &strict));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_mutations_are_serialized() {
    let app = app();
    let id = create(&app, None).await;
    let tasks: Vec<_> = (0..12)
        .map(|i| {
            let (app, id) = (app.clone(), id.clone());
            tokio::spawn(async move { append(&app, &id, &[if i % 2 == 0 { "cat" } else { "milk" }]).await })
        })
        .collect();
    let mut lengths = Vec::new();
    for t in tasks {
        let (status, body) = t.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        lengths.push(view(body).report.sequence.len());
    }
    lengths.sort();
    assert_eq!(lengths, (1..=12).collect::<Vec<_>>(), "each append saw all earlier ones");
    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(view(body).report.sequence.len(), 12);
}

#[tokio::test]
async fn lexicon_and_health() {
    let app = app();
    let (status, body) = call(&app, Method::GET, "/lexicon", None).await;
    assert_eq!(status, StatusCode::OK);
    let icons = body["icons"].as_array().unwrap();
    assert_eq!(icons.len(), resolve_lexicon("demo").unwrap().len());
    let drink = icons.iter().find(|i| i["id"] == "drink").unwrap();
    assert_eq!(drink["valency"], 2);
    assert_eq!(drink["predicative"], true);
    assert_eq!(drink["cases"][1]["case"], "object");

    create(&app, None).await;
    let (status, body) = call(&app, Method::GET, "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "status": "ok", "sessions": 1 }));
}
