use agentloop_cli::service::router;
use agentloop_cli::{run_cli, SimulationReport};
use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

async fn call(method: Method, uri: &str) -> (StatusCode, String, String) {
    let request = Request::builder().method(method).uri(uri).body(Body::empty()).unwrap();
    let response = router().oneshot(request).await.unwrap();
    let status = response.status();
    let content_type = response
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_owned())
        .unwrap_or_default();
    let body = response.into_body().collect().await.unwrap().to_bytes();
    (status, content_type, String::from_utf8(body.to_vec()).unwrap())
}

#[tokio::test]
async fn get_and_post_agree() {
    let (status, content_type, get) = call(Method::GET, "/simulation/simulate?ticks=20&bias=5").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(content_type, "application/json");
    let (status, _, post) = call(Method::POST, "/simulation/simulate?ticks=20&bias=5").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(get, post);
    let report: SimulationReport = serde_json::from_str(&get).unwrap();
    assert_eq!(report.per_tick.len(), 20);
    assert_eq!(report.ticks, 20);
}

#[tokio::test]
async fn matches_cli_output() {
    let (_, _, body) = call(Method::GET, "/simulation/simulate?ticks=7&bias=1.5&seed=12").await;
    let mut out = Vec::new();
    let args = [
        "agentloop",
        "run",
        "--scenario",
        "opinion",
        "--ticks",
        "7",
        "--bias",
        "1.5",
        "--seed",
        "12",
        "--format",
        "json",
    ];
    assert_eq!(run_cli(args, &mut out, &mut Vec::new()), 0);
    let cli: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let http: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(cli, http);
}

#[tokio::test]
async fn invalid_parameters_are_bad_requests() {
    for uri in [
        "/simulation/simulate?ticks=-1",
        "/simulation/simulate?bias=2",
        "/simulation/simulate?ticks=5&bias=-1",
        "/simulation/simulate?ticks=5&bias=inf",
        "/simulation/simulate",
    ] {
        let (status, content_type, body) = call(Method::GET, uri).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        assert_eq!(content_type, "application/json");
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        assert!(v["error"].is_string(), "{uri}");
    }
}

#[tokio::test]
async fn other_paths_are_not_found() {
    let (status, _, _) = call(Method::GET, "/simulation").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
