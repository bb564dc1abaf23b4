//! HTTP runtime for generated quantum services.
//!
//! [`serve_bundle`] takes a [`ServiceBundle`] and exposes each manifest
//! entry at `POST <path>`, plus `GET /health` and `GET /openapi.yaml`.
//! Execution requests are JSON (`{"shots": n?, "seed": s?}`) and responses
//! carry `counts`, the effective `shots`, the `seed` actually used (fresh
//! and random when the request named none — echoing it keeps every response
//! reproducible after the fact) and the `backend` id.
//!
//! The manifest and circuits are immutable shared state; every request owns
//! its private simulator buffers, so any number of requests may run
//! concurrently. Shutdown drains: in-flight requests finish, the listener
//! closes, and the port is immediately free for the next deployment.

pub mod backend;
pub mod httpd;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backend::{
    standard_backends, Backend, BackendError, BackendMap, LocalSimulatorBackend, MockBehavior,
    MockRemoteBackend, MOCK_BACKEND_ID,
};
use httpd::{HttpRequest, HttpResponse, HttpServer};
use qsf_core::codegen::{ManifestEntry, ServiceBundle};
use qsf_core::contract::normalized_path;
use qsf_core::prng::fresh_seed;
use qsf_core::sim::{ExecutionResult, MAX_SHOTS};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("manifest names unknown backend {0:?}")]
    UnknownBackend(String),
    #[error("failed to start service: {0}")]
    Io(String),
}

/// Execution request body. Unknown fields are ignored for forward
/// compatibility; absent fields fall back to the binding's defaults.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
pub struct RunRequest {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum ExecuteError {
    #[error("shots must be between 1 and {MAX_SHOTS}, got {0}")]
    BadShots(u64),
    #[error("unknown backend {0:?}")]
    UnknownBackend(String),
    #[error("backend {backend} failed: {message}")]
    BackendFailed { backend: String, message: String },
}

/// Error body mirroring the diagnostic shape.
#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

pub fn error_response(status: u16, code: &str, message: String) -> HttpResponse {
    let body = ErrorBody {
        code: code.to_string(),
        message,
        location: None,
    };
    HttpResponse::json(status, serde_json::to_string(&body).expect("error body"))
}

/// Executes one manifest entry: applies shot defaults and bounds, picks the
/// entry's backend, draws a fresh seed when the request has none.
pub fn execute_endpoint(
    entry: &ManifestEntry,
    request: &RunRequest,
    backends: &BackendMap,
) -> Result<ExecutionResult, ExecuteError> {
    let shots = request.shots.unwrap_or(entry.default_shots);
    if shots == 0 || shots > MAX_SHOTS {
        return Err(ExecuteError::BadShots(shots));
    }
    let seed = request.seed.unwrap_or_else(fresh_seed);
    let backend = backends
        .get(&entry.backend)
        .ok_or_else(|| ExecuteError::UnknownBackend(entry.backend.clone()))?;
    backend
        .execute(&entry.circuit, shots, seed)
        .map_err(|e| ExecuteError::BackendFailed {
            backend: entry.backend.clone(),
            message: e.to_string(),
        })
}

struct ServiceState {
    bundle: ServiceBundle,
    backends: BackendMap,
}

/// A running service instance. Dropping it shuts the listener down and
/// drains in-flight requests.
pub struct RunningService {
    server: HttpServer,
}

impl RunningService {
    pub fn port(&self) -> u16 {
        self.server.port()
    }

    /// Stops accepting requests, lets in-flight ones finish, closes the port.
    pub fn shutdown(self) {
        self.server.shutdown();
    }
}

/// Binds `127.0.0.1:port` and serves the bundle. Fails fast when the port is
/// taken or the manifest names a backend that was not supplied.
pub fn serve_bundle(
    bundle: ServiceBundle,
    port: u16,
    backends: BackendMap,
) -> Result<RunningService, ServeError> {
    for entry in &bundle.manifest {
        if !backends.contains_key(&entry.backend) {
            return Err(ServeError::UnknownBackend(entry.backend.clone()));
        }
    }
    let state = Arc::new(ServiceState { bundle, backends });
    let server = httpd::serve(port, Arc::new(move |req| handle_request(&state, req))).map_err(
        |e| match e {
            httpd::BindError::PortInUse(p) => ServeError::PortInUse(p),
            httpd::BindError::Io(io) => ServeError::Io(io.to_string()),
        },
    )?;
    Ok(RunningService { server })
}

fn handle_request(state: &ServiceState, request: HttpRequest) -> HttpResponse {
    let path = request.path.split('?').next().unwrap_or("/").to_string();

    match (request.method.as_str(), path.as_str()) {
        ("GET", "/health") => {
            return HttpResponse::json(
                200,
                format!(
                    r#"{{"status":"ok","endpoints":{}}}"#,
                    state.bundle.manifest.len()
                ),
            );
        }
        ("GET", "/openapi.yaml") => {
            let text = state
                .bundle
                .emitted
                .get("openapi.effective.yaml")
                .cloned()
                .unwrap_or_default();
            return HttpResponse::yaml(text);
        }
        _ => {}
    }

    let Some(entry) = state
        .bundle
        .manifest
        .iter()
        .find(|e| normalized_path(&e.path) == normalized_path(&path))
    else {
        let known: Vec<&str> = state
            .bundle
            .manifest
            .iter()
            .map(|e| e.path.as_str())
            .collect();
        return error_response(
            404,
            "E_NOT_FOUND",
            format!("no endpoint at {path:?}; available: {known:?}"),
        );
    };
    if request.method != "POST" {
        return error_response(
            405,
            "E_METHOD_NOT_ALLOWED",
            format!("{path} only accepts POST"),
        );
    }

    let run_request: RunRequest = if request.body.trim().is_empty() {
        RunRequest::default()
    } else {
        match serde_json::from_str(&request.body) {
            Ok(r) => r,
            Err(e) => {
                return error_response(400, "E_BAD_REQUEST", format!("invalid JSON body: {e}"))
            }
        }
    };

    match execute_endpoint(entry, &run_request, &state.backends) {
        Ok(result) => HttpResponse::json(200, result.to_canonical_json()),
        Err(e @ ExecuteError::BadShots(_)) => error_response(400, "E_BAD_SHOTS", e.to_string()),
        Err(e @ ExecuteError::UnknownBackend(_)) => {
            error_response(502, "E_UNKNOWN_BACKEND", e.to_string())
        }
        Err(e @ ExecuteError::BackendFailed { .. }) => {
            error_response(502, "E_BACKEND", e.to_string())
        }
    }
}
