//! End-to-end tests of a served bundle over real HTTP.

use std::collections::BTreeMap;
use std::sync::Arc;

use qsf_core::codegen::generate_bundle;
use qsf_core::contract::parse_spec;
use qsf_core::fetch::MapFetcher;
use qsf_core::sim::ExecutionResult;
use qsf_runtime::{
    serve_bundle, standard_backends, BackendMap, MockBehavior, MockRemoteBackend, RunningService,
    ServeError,
};
use qsf_testkit::{fixtures_dir, free_port};

fn fixture_bundle(name: &str) -> qsf_core::ServiceBundle {
    let text = std::fs::read_to_string(fixtures_dir().join(format!("specs/{name}.yaml"))).unwrap();
    generate_bundle(&text, &MapFetcher::new()).expect("fixture generates")
}

fn serve_fixture(name: &str) -> RunningService {
    let backends = standard_backends(&BTreeMap::new()).unwrap();
    serve_bundle(fixture_bundle(name), free_port(), backends).expect("serve")
}

fn post(port: u16, path: &str, body: &str) -> (u16, String) {
    let url = format!("http://127.0.0.1:{port}{path}");
    match ureq::post(&url).send(body) {
        Ok(mut resp) => (
            resp.status().as_u16(),
            resp.body_mut().read_to_string().unwrap(),
        ),
        Err(ureq::Error::StatusCode(code)) => (code, String::new()),
        Err(e) => panic!("POST {url}: {e}"),
    }
}

fn post_full(port: u16, path: &str, body: &str) -> (u16, String) {
    // ureq treats 4xx/5xx as errors unless configured otherwise; keep the body.
    let url = format!("http://127.0.0.1:{port}{path}");
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into();
    let mut resp = agent.post(&url).send(body).unwrap();
    (
        resp.status().as_u16(),
        resp.body_mut().read_to_string().unwrap(),
    )
}

fn get(port: u16, path: &str) -> (u16, String) {
    let url = format!("http://127.0.0.1:{port}{path}");
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into();
    let mut resp = agent.get(&url).call().unwrap();
    (
        resp.status().as_u16(),
        resp.body_mut().read_to_string().unwrap(),
    )
}

#[test]
fn bell_endpoint_returns_entangled_counts() {
    let service = serve_fixture("bell");
    let (status, body) = post(service.port(), "/bell", r#"{"shots":10000,"seed":7}"#);
    assert_eq!(status, 200);
    let result: ExecutionResult = serde_json::from_str(&body).unwrap();
    assert_eq!(result.shots, 10_000);
    assert_eq!(result.seed, 7);
    assert!(
        result.counts.keys().all(|k| k == "00" || k == "11"),
        "{body}"
    );
    assert_eq!(result.total(), 10_000);

    // Byte-identical reruns with a pinned seed.
    let (_, again) = post(service.port(), "/bell", r#"{"shots":10000,"seed":7}"#);
    assert_eq!(body, again);

    // And byte-identical to the sampler's golden file.
    let golden = std::fs::read_to_string(fixtures_dir().join("counts/bell.7.json")).unwrap();
    assert_eq!(format!("{body}\n"), golden);
    service.shutdown();
}

#[test]
fn omitted_fields_use_defaults_and_echo_seed() {
    let service = serve_fixture("bell");
    let (status, body) = post(service.port(), "/bell", "{}");
    assert_eq!(status, 200);
    let result: ExecutionResult = serde_json::from_str(&body).unwrap();
    assert_eq!(result.shots, 1024, "binding's default-shots");
    assert_eq!(result.total(), 1024);

    // Empty body behaves like {}.
    let (status, body) = post(service.port(), "/bell", "");
    assert_eq!(status, 200);
    let reran: ExecutionResult = serde_json::from_str(&body).unwrap();
    assert_eq!(reran.shots, 1024);
    service.shutdown();
}

#[test]
fn bad_requests_get_diagnostic_bodies() {
    let service = serve_fixture("bell");
    let (status, body) = post_full(service.port(), "/bell", r#"{"shots":0}"#);
    assert_eq!(status, 400);
    assert!(body.contains("E_BAD_SHOTS"), "{body}");

    let (status, body) = post_full(service.port(), "/bell", r#"{"shots": -3}"#);
    assert_eq!(status, 400);
    assert!(body.contains("E_BAD_REQUEST"), "{body}");

    let (status, body) = post_full(service.port(), "/nowhere", "{}");
    assert_eq!(status, 404);
    assert!(
        body.contains("E_NOT_FOUND") && body.contains("/bell"),
        "{body}"
    );

    let (status, body) = get(service.port(), "/bell");
    assert_eq!(status, 405);
    assert!(body.contains("E_METHOD_NOT_ALLOWED"), "{body}");
    service.shutdown();
}

#[test]
fn trailing_slash_routes_to_the_same_endpoint() {
    let service = serve_fixture("bell");
    let (status, body) = post(service.port(), "/bell/", r#"{"shots":10,"seed":1}"#);
    assert_eq!(status, 200, "{body}");
    service.shutdown();
}

#[test]
fn health_reports_endpoint_count() {
    let service = serve_fixture("two-endpoint");
    let (status, body) = get(service.port(), "/health");
    assert_eq!(status, 200);
    assert_eq!(body, r#"{"status":"ok","endpoints":2}"#);
    service.shutdown();
}

#[test]
fn served_contract_parses_back_to_the_deployed_spec() {
    let text = std::fs::read_to_string(fixtures_dir().join("specs/two-endpoint.yaml")).unwrap();
    let deployed = parse_spec(&text).unwrap().spec;
    let service = serve_fixture("two-endpoint");
    let (status, yaml) = get(service.port(), "/openapi.yaml");
    assert_eq!(status, 200);
    let served = parse_spec(&yaml).expect("served contract parses").spec;
    assert_eq!(served, deployed);
    service.shutdown();
}

#[test]
fn concurrent_requests_stay_independent() {
    let service = Arc::new(serve_fixture("bell"));
    let mut handles = Vec::new();
    for seed in 0..8u64 {
        let service = Arc::clone(&service);
        handles.push(std::thread::spawn(move || {
            let body = format!(r#"{{"shots":2000,"seed":{seed}}}"#);
            let (status, response) = post(service.port(), "/bell", &body);
            assert_eq!(status, 200);
            let result: ExecutionResult = serde_json::from_str(&response).unwrap();
            assert_eq!(result.total(), 2000, "seed {seed}");
            assert_eq!(result.seed, seed);
            result
        }));
    }
    let results: Vec<ExecutionResult> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    // Distinct seeds should not all coincide.
    assert!(results.windows(2).any(|w| w[0].counts != w[1].counts));
}

#[test]
fn mock_remote_failures_surface_as_502() {
    let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /flaky:
    post:
      operationId: flaky
      x-quantum:
        inline-qasm: "OPENQASM 2.0; qreg q[1]; creg c[1]; x q[0]; measure q[0] -> c[0];"
        backend: mock-remote
"#;
    let bundle = generate_bundle(doc, &MapFetcher::new()).unwrap();
    let mut backends: BackendMap = BTreeMap::new();
    backends.insert(
        "mock-remote".to_string(),
        Arc::new(MockRemoteBackend::new(MockBehavior::Fail {
            message: "QPU offline".into(),
        })),
    );
    let service = serve_bundle(bundle, free_port(), backends).unwrap();
    let (status, body) = post_full(service.port(), "/flaky", "{}");
    assert_eq!(status, 502);
    assert!(
        body.contains("E_BACKEND") && body.contains("QPU offline"),
        "{body}"
    );
    service.shutdown();
}

#[test]
fn unknown_backend_is_rejected_before_serving() {
    let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /q:
    post:
      operationId: q
      x-quantum:
        inline-qasm: "OPENQASM 2.0; qreg q[1];"
        backend: braket-ionq
"#;
    let bundle = generate_bundle(doc, &MapFetcher::new()).unwrap();
    let backends = standard_backends(&BTreeMap::new()).unwrap();
    match serve_bundle(bundle, free_port(), backends) {
        Err(ServeError::UnknownBackend(id)) => assert_eq!(id, "braket-ionq"),
        other => panic!(
            "expected UnknownBackend, got {other:?}",
            other = other.err()
        ),
    }
}

#[test]
fn occupied_port_is_reported() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    let backends = standard_backends(&BTreeMap::new()).unwrap();
    match serve_bundle(fixture_bundle("bell"), port, backends) {
        Err(ServeError::PortInUse(p)) => assert_eq!(p, port),
        other => panic!("expected PortInUse, got {other:?}", other = other.err()),
    }
}
