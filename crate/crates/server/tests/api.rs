use std::net::SocketAddr;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tabforge_server::{router, status_for, ApiError, ServerConfig};
use tabforge_testkit::api::{api_contract, check_error_body, seed_store};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_owned()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn scripted_client_over_tcp() {
    let dir = tempfile::tempdir().unwrap();
    seed_store(dir.path()).unwrap();
    let app = router(ServerConfig::new(dir.path())).unwrap();
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0)))
        .await
        .unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await });
    let r = api_contract(&format!("http://{addr}"), 8, 20).await;
    assert!(r.is_ok(), "{}", r.unwrap_err());
}

#[tokio::test]
async fn error_mapping() {
    let dir = tempfile::tempdir().unwrap();
    seed_store(dir.path()).unwrap();
    let app = router(ServerConfig::new(dir.path())).unwrap();

    let (s, b) = call(&app, "GET", "/api/sessions/..%2Fetc", "").await;
    let v: Value = serde_json::from_str(&b).unwrap();
    assert_eq!(check_error_body(s, &v).unwrap(), "bad_request");

    let (s, b) = call(
        &app,
        "POST",
        "/api/sessions/a1/edits",
        &json!({"op": "edit_key", "variant": "A", "key": "Released", "new_key": "Producer"}).to_string(),
    )
    .await;
    let v: Value = serde_json::from_str(&b).unwrap();
    assert_eq!(check_error_body(s, &v).unwrap(), "bad_request");

    let (s, b) = call(&app, "GET", "/api/sessions/a1/checkpoints", "").await;
    assert_eq!((s, b.as_str()), (StatusCode::OK, "[]"));
}

#[tokio::test]
async fn export_blocked_by_structural_lint() {
    let dir = tempfile::tempdir().unwrap();
    let sessions = seed_store(dir.path()).unwrap();
    let mut s = sessions[0].clone();
    s.counterfactuals.b.sections[0].values[0].text = String::new();
    tabforge_core::SessionStore::open(dir.path())
        .unwrap()
        .put_session(&s)
        .unwrap();
    let app = router(ServerConfig::new(dir.path())).unwrap();
    let (status, body) = call(&app, "GET", "/api/export", "").await;
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(check_error_body(status, &v).unwrap(), "lint_blocked");
    assert!(v["details"]["entries"].as_array().is_some_and(|e| !e.is_empty()));
    let (status, _) = call(&app, "GET", "/api/export?force=true", "").await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn ui_dir_is_served() {
    let dir = tempfile::tempdir().unwrap();
    let ui = tempfile::tempdir().unwrap();
    std::fs::write(ui.path().join("index.html"), "<h1>ui</h1>").unwrap();
    let mut cfg = ServerConfig::new(dir.path());
    cfg.ui_dir = Some(ui.path().to_owned());
    let app = router(cfg).unwrap();
    assert_eq!(call(&app, "GET", "/", "").await, (StatusCode::OK, "<h1>ui</h1>".into()));
    assert_eq!(call(&app, "GET", "/api/sessions", "").await.1, "[]");
}

#[test]
fn codes_and_statuses() {
    let e = ApiError::new("type_violation", "x");
    assert_eq!(e.http_status, 409);
    assert_eq!(status_for("lint_blocked"), Some(422));
    assert_eq!(status_for("nope"), None);
}
