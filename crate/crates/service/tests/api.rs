use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use gradient_core::classifier::LexiconClassifier;
use gradient_core::gateway::{RemoteOptions, RetryPolicy};
use gradient_core::generator::{EchoGenerator, RemoteGenerator};
use gradient_core::graph::TransitionGraph;
use gradient_service::{router, AppState, CorsConfig};

fn app() -> Router {
    let state = AppState::new(
        TransitionGraph::default(),
        Arc::new(LexiconClassifier::default()),
        Arc::new(EchoGenerator),
    );
    router(state, &CorsConfig::default()).unwrap()
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, header::HeaderMap, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, headers, body)
}

async fn post(app: &Router, path: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(path)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (status, _, bytes) = send(app, req).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn assert_error(body: &Value, code: &str) {
    assert_eq!(body["code"], code, "{body}");
    assert!(!body["message"].as_str().unwrap().is_empty());
}

#[tokio::test]
async fn classify_reports_dominant_emotion_and_scores() {
    let app = app();
    let (status, body) = post(&app, "/api/classify", json!({"text": "I am furious"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["emotion"], "anger");
    assert_eq!(body["id"], 2);
    assert_eq!(body["scores"].as_array().unwrap().len(), 28);
    assert!(body["score"].as_f64().unwrap() > 0.5);
}

#[tokio::test]
async fn classify_below_threshold_has_no_emotion() {
    let (status, body) = post(&app(), "/api/classify", json!({"text": "the table is brown"})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body["emotion"].is_null());
    assert!(body["id"].is_null());
    assert!(body["score"].is_null());
    assert_eq!(body["scores"].as_array().unwrap().len(), 28);
}

#[tokio::test]
async fn classify_rejects_empty_and_malformed_bodies() {
    let app = app();
    let (status, body) = post(&app, "/api/classify", json!({"text": ""})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&body, "bad_request");

    let (status, body) = post(&app, "/api/classify", json!({"txt": "hi"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&body, "bad_request");

    let req = Request::post("/api/classify").body(Body::from("{not json")).unwrap();
    let (status, _, bytes) = send(&app, req).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&serde_json::from_slice(&bytes).unwrap(), "bad_request");
}

#[tokio::test]
async fn graph_document_round_trips_with_stable_etag() {
    let app = app();
    let (status, h1, b1) = send(&app, Request::get("/api/graph").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let (_, h2, b2) = send(&app, Request::get("/graph").body(Body::empty()).unwrap()).await;
    assert_eq!(b1, b2);
    let etag = h1.get(header::ETAG).unwrap().clone();
    assert_eq!(Some(&etag), h2.get(header::ETAG));

    let g = TransitionGraph::load(std::str::from_utf8(&b1).unwrap()).unwrap();
    assert_eq!(g.node_count(), 28);
    assert_eq!(g.edge_count(), 53);
    assert_eq!(g, TransitionGraph::default());

    let req = Request::get("/api/graph")
        .header(header::IF_NONE_MATCH, etag)
        .body(Body::empty())
        .unwrap();
    let (status, _, body) = send(&app, req).await;
    assert_eq!(status, StatusCode::NOT_MODIFIED);
    assert!(body.is_empty());
}

#[tokio::test]
async fn transitions_follow_the_graph() {
    let app = app();
    let (status, body) = post(&app, "/api/transitions", json!({"emotion": "anger"})).await;
    assert_eq!(status, StatusCode::OK);
    let targets: Vec<&str> = body["suggestions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["target"].as_str().unwrap())
        .collect();
    assert_eq!(targets, ["disgust", "annoyance", "disapproval", "neutral"]);
    assert_eq!(body["suggestions"][1]["hops"], 2);

    let (_, by_id) = post(&app, "/api/transitions", json!({"emotion": 2})).await;
    assert_eq!(by_id, body);

    let (status, body) = post(&app, "/api/transitions", json!({"emotion": "neutral"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["suggestions"], json!([]));

    let (status, body) = post(&app, "/api/transitions", json!({"emotion": "angst"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&body, "not_found");
}

#[tokio::test]
async fn paraphrase_with_echo_backend() {
    let app = app();
    let (status, body) = post(
        &app,
        "/api/paraphrase",
        json!({"text": "you never listen", "source": "anger", "target": "annoyance"}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["output"], "you never listen");
    assert_eq!(body["prefix"], "2 to 3: you never listen");
    assert_eq!(body["source"], "anger");
    assert_eq!(body["target"], "annoyance");
    assert_eq!(body["graph_valid"], true);
}

#[tokio::test]
async fn paraphrase_classifies_missing_source() {
    let (status, body) = post(
        &app(),
        "/api/paraphrase",
        json!({"text": "I am furious", "source": null, "target": 3}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["source"], "anger");
    assert_eq!(body["prefix"], "2 to 3: I am furious");
}

#[tokio::test]
async fn paraphrase_off_graph_still_runs() {
    let (status, body) = post(
        &app(),
        "/api/paraphrase",
        json!({"text": "meh", "source": "annoyance", "target": "anger"}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["graph_valid"], false);
    assert_eq!(body["output"], "meh");
}

#[tokio::test]
async fn paraphrase_rejects_unknown_target() {
    let (status, body) = post(
        &app(),
        "/api/paraphrase",
        json!({"text": "hello", "source": "joy", "target": "serene"}),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&body, "bad_request");
}

#[tokio::test]
async fn paraphrase_reports_unavailable_generator() {
    let opts = RemoteOptions {
        retry: RetryPolicy {
            attempts: 2,
            initial_backoff: std::time::Duration::from_millis(1),
        },
        ..RemoteOptions::default()
    };
    let state = AppState::new(
        TransitionGraph::default(),
        Arc::new(LexiconClassifier::default()),
        Arc::new(RemoteGenerator::new("http://127.0.0.1:9", opts).unwrap()),
    );
    let app = router(state, &CorsConfig::default()).unwrap();
    let (status, body) = post(
        &app,
        "/api/paraphrase",
        json!({"text": "hello", "source": "joy", "target": "neutral"}),
    )
    .await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_error(&body, "backend_unavailable");
}

#[tokio::test]
async fn unknown_route_is_a_json_404() {
    let (status, _, bytes) = send(&app(), Request::get("/api/nope").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&serde_json::from_slice(&bytes).unwrap(), "not_found");
}

#[tokio::test]
async fn cors_headers_present() {
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/api/classify")
        .header(header::ORIGIN, "http://localhost:5173")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
        .body(Body::empty())
        .unwrap();
    let (status, headers, _) = send(&app(), req).await;
    assert!(status.is_success());
    assert_eq!(headers.get(header::ACCESS_CONTROL_ALLOW_ORIGIN).unwrap(), "*");

    let restricted = router(
        AppState::new(
            TransitionGraph::default(),
            Arc::new(LexiconClassifier::default()),
            Arc::new(EchoGenerator),
        ),
        &CorsConfig {
            origins: vec!["http://ui.local".into()],
        },
    )
    .unwrap();
    let req = Request::get("/api/graph")
        .header(header::ORIGIN, "http://ui.local")
        .body(Body::empty())
        .unwrap();
    let (_, headers, _) = send(&restricted, req).await;
    assert_eq!(headers.get(header::ACCESS_CONTROL_ALLOW_ORIGIN).unwrap(), "http://ui.local");
}
