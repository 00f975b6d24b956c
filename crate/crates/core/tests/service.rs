use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use taoist::aui::FuiDocument;
use taoist::engine::{Engine, EngineConfig, Store};
use taoist::fixtures;
use taoist::sequence::parse_log;
use taoist::service::{router, SharedEngine};

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => builder
            .header("content-type", "application/json")
            .body(Body::from(v.to_string())),
        None => builder.body(Body::empty()),
    }
    .unwrap();
    send(app, req).await
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn post_model(app: &Router, xml: &str) -> String {
    let req = Request::post("/models")
        .body(Body::from(xml.to_string()))
        .unwrap();
    let (status, body) = send(app, req).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    body["model_id"].as_str().unwrap().to_string()
}

fn shared(config: EngineConfig) -> SharedEngine {
    Arc::new(Mutex::new(Engine::new(config).unwrap()))
}

#[tokio::test]
async fn health_reports_version() {
    let app = router(shared(EngineConfig::default()));
    let (status, body) = call(&app, Method::GET, "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["version"], env!("CARGO_PKG_VERSION"));
}

#[tokio::test]
async fn car_rental_document_has_five_navigable_panels() {
    let app = router(shared(EngineConfig::default()));
    let model_id = post_model(&app, fixtures::CAR_RENTAL_XML).await;
    let start = json!({"model_id": model_id, "scenario": "intra", "user": "ana"});
    let (status, body) = call(&app, Method::POST, "/sessions", Some(start)).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let fui: FuiDocument = serde_json::from_value(body["fui"].clone()).unwrap();
    assert_eq!(fui.panels.len(), 5);
    assert_eq!(fui.rating.min, 1);
    assert_eq!(fui.rating.max, 5);
    assert!(fui.panels[0].nav.prev.target.is_none());
    assert_eq!(fui.panels[0].nav.next.target, Some(1));
    assert!(fui.panels[4].nav.next.target.is_none());

    let sid = body["session_id"].as_str().unwrap();
    let (status, again) = call(&app, Method::GET, &format!("/sessions/{sid}/fui"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, body["fui"]);
}

#[tokio::test]
async fn clearing_a_field_sends_a_remove_event() {
    let engine = shared(EngineConfig::default());
    let app = router(engine.clone());
    let model_id = post_model(&app, fixtures::BANK_TRANSFER_XML).await;
    let start = json!({"model_id": model_id, "scenario": "intra", "user": "ana"});
    let (_, body) = call(&app, Method::POST, "/sessions", Some(start)).await;
    let sid = body["session_id"].as_str().unwrap().to_string();
    let uri = format!("/sessions/{sid}/actions");

    let (status, out) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"action": "IBAN", "edit": "add"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{out}");
    assert_eq!(out["enablement"]["Classic"], false);
    assert_eq!(out["completed"], false);
    assert_eq!(
        engine.lock().unwrap().session(&sid).unwrap().performed(),
        ["IBAN"]
    );

    let (status, out) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"action": "IBAN", "edit": "remove"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{out}");
    assert_eq!(out["enablement"]["Classic"], true);
    assert!(engine
        .lock()
        .unwrap()
        .session(&sid)
        .unwrap()
        .performed()
        .is_empty());
}

#[tokio::test]
async fn accepted_rating_reaches_the_store() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let engine = shared(EngineConfig {
        store_path: Some(path.clone()),
        ..EngineConfig::default()
    });
    let app = router(engine.clone());
    let model_id = post_model(&app, fixtures::CAR_RENTAL_XML).await;
    let log = parse_log(fixtures::CAR_RENTAL_LOG).unwrap();
    engine
        .lock()
        .unwrap()
        .import_sequences(&model_id, "ana", &log)
        .unwrap();

    let start = json!({"model_id": model_id, "scenario": "intra", "user": "ana"});
    let (_, body) = call(&app, Method::POST, "/sessions", Some(start)).await;
    let sid = body["session_id"].as_str().unwrap().to_string();
    let (status, proposals) = call(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/adaptation/trigger"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{proposals}");
    let list = proposals["proposals"].as_array().unwrap();
    assert!(!list.is_empty());
    assert!(list[0]["fui_preview"]["panels"].is_array());

    let feedback = json!({"verb": "accept", "rating": 4});
    let (status, body) = call(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/feedback"),
        Some(feedback),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert!(body["fui"]["panels"].is_array());

    let (status, _) = call(&app, Method::DELETE, &format!("/sessions/{sid}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let store = Store::load(&path).unwrap();
    let profile = store.profile(&model_id, "ana").unwrap();
    assert_eq!(profile.adaptations.last().unwrap().rating, Some(4));

    let (status, alts) = call(
        &app,
        Method::GET,
        &format!("/groups/none/alternatives?model={model_id}&user=bob"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(alts, json!([]));
}

#[tokio::test]
async fn request_bodies_are_strict() {
    let app = router(shared(EngineConfig::default()));
    let model_id = post_model(&app, fixtures::FIG4_XML).await;
    let extra = json!({"model_id": model_id, "scenario": "intra", "user": "ana", "colour": "red"});
    let (status, body) = call(&app, Method::POST, "/sessions", Some(extra)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_request");

    let start = json!({"model_id": model_id, "scenario": "intra", "user": "ana"});
    let (_, body) = call(&app, Method::POST, "/sessions", Some(start)).await;
    let sid = body["session_id"].as_str().unwrap();
    let (status, body) = call(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/feedback"),
        Some(json!({"verb": "accept", "rating": 9})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_ne!(body["code"], "invalid_request");

    let mut weights = serde_json::to_value(taoist::aui::ScoreWeights::default()).unwrap();
    weights["ubp_weight"] = json!(-1.0);
    let (status, body) = call(
        &app,
        Method::PUT,
        &format!("/sessions/{sid}/weights"),
        Some(weights),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_ne!(body["code"], "invalid_request");
}

#[tokio::test]
async fn error_codes_map_to_statuses() {
    let app = router(shared(EngineConfig::default()));
    let (status, body) = call(&app, Method::GET, "/sessions/s99/fui", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown_session");

    let start = json!({"model_id": "nope", "scenario": "inter", "user": "ana"});
    let (status, body) = call(&app, Method::POST, "/sessions", Some(start)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown_model");

    let req = Request::post("/models").body(Body::from("<task")).unwrap();
    let (status, _) = send(&app, req).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let model_id = post_model(&app, fixtures::APPENDIX_XML).await;
    let altered = fixtures::APPENDIX_XML.replace("T4", "T9");
    let req = Request::post("/models").body(Body::from(altered)).unwrap();
    let (status, body) = send(&app, req).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "model_conflict");

    let start = json!({"model_id": model_id, "scenario": "intra", "user": "ana"});
    let (_, body) = call(&app, Method::POST, "/sessions", Some(start)).await;
    let sid = body["session_id"].as_str().unwrap();
    let uri = format!("/sessions/{sid}/actions");
    let (status, body) = call(
        &app,
        Method::POST,
        &uri,
        Some(json!({"action": "T3", "edit": "add"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "action_disabled");
    assert_eq!(body["detail"]["action"], "T3");

    let (status, body) = call(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/feedback"),
        Some(json!({"verb": "accept"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT, "{body}");
    assert_eq!(body["code"], "no_pending_proposals");
}

#[tokio::test]
async fn shutdown_drains_live_sessions() {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let engine = shared(EngineConfig {
        store_path: Some(path.clone()),
        ..EngineConfig::default()
    });
    let (model_id, sid) = {
        let mut e = engine.lock().unwrap();
        let id = e.register_model(fixtures::FIG4_XML).unwrap();
        let (sid, _) = e
            .start_session(&id, taoist::engine::Scenario::Intra, "ana", None, None)
            .unwrap();
        e.handle_action(&sid, "T1", taoist::dialog::Edit::Add)
            .unwrap();
        (id, sid)
    };
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(taoist::service::serve(listener, engine.clone(), async {
        let _ = stopped.await;
    }));

    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    stream
        .write_all(b"GET /healthz HTTP/1.1\r\nhost: localhost\r\nconnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut reply = String::new();
    stream.read_to_string(&mut reply).await.unwrap();
    assert!(reply.starts_with("HTTP/1.1 200"), "{reply}");
    assert!(reply.contains("\"status\":\"ok\""));

    stop.send(()).unwrap();
    server.await.unwrap().unwrap();
    assert!(engine.lock().unwrap().session(&sid).is_err());
    let store = Store::load(&path).unwrap();
    assert_eq!(
        store.profile(&model_id, "ana").unwrap().sequences,
        vec![vec!["T1".to_string()]]
    );
}
