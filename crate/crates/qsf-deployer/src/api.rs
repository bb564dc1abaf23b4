//! The deployer's own HTTP surface.
//!
//! ```text
//! POST   /deployments        {"spec_url": "...", "credentials": {...}}  → 201 record
//! GET    /deployments                                                   → 200 [records]
//! GET    /deployments/{id}                                              → 200 record | 404
//! DELETE /deployments/{id}                                              → 200 record | 404
//! GET    /health                                                        → 200 {"status":"ok",...}
//! ```
//!
//! Records are returned as JSON; credentials are forwarded to backend
//! construction and never appear in responses or on disk.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use qsf_runtime::error_response;
use qsf_runtime::httpd::{self, HttpRequest, HttpResponse, HttpServer};

use crate::Deployer;

#[derive(Debug, Deserialize)]
struct DeployRequest {
    spec_url: String,
    #[serde(default)]
    credentials: BTreeMap<String, String>,
}

/// The deployer API bound to its own port. Dropping stops the listener and
/// every running service instance.
pub struct DeployerService {
    deployer: Arc<Deployer>,
    server: Option<HttpServer>,
}

impl DeployerService {
    pub fn port(&self) -> u16 {
        self.server.as_ref().expect("server until drop").port()
    }

    pub fn deployer(&self) -> &Arc<Deployer> {
        &self.deployer
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        if let Some(server) = self.server.take() {
            server.shutdown();
            self.deployer.shutdown_all();
        }
    }
}

impl Drop for DeployerService {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Serves the Deployment API on `127.0.0.1:port`.
pub fn serve(deployer: Arc<Deployer>, port: u16) -> Result<DeployerService, String> {
    let handler_deployer = Arc::clone(&deployer);
    let server = httpd::serve(port, Arc::new(move |req| handle(&handler_deployer, req)))
        .map_err(|e| e.to_string())?;
    Ok(DeployerService {
        deployer,
        server: Some(server),
    })
}

fn handle(deployer: &Deployer, request: HttpRequest) -> HttpResponse {
    let path = request.path.split('?').next().unwrap_or("/").to_string();
    let segments: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();

    match (request.method.as_str(), segments.as_slice()) {
        ("GET", ["health"]) => HttpResponse::json(
            200,
            format!(
                r#"{{"status":"ok","deployments":{}}}"#,
                deployer.list().len()
            ),
        ),
        ("GET", ["deployments"]) => HttpResponse::json(
            200,
            serde_json::to_string(&deployer.list()).expect("records"),
        ),
        ("GET", ["deployments", id]) => match deployer.get(id) {
            Ok(record) => HttpResponse::json(200, serde_json::to_string(&record).unwrap()),
            Err(e) => error_response(404, "E_NOT_FOUND", e.to_string()),
        },
        ("DELETE", ["deployments", id]) => match deployer.teardown(id) {
            Ok(record) => HttpResponse::json(200, serde_json::to_string(&record).unwrap()),
            Err(e) => error_response(404, "E_NOT_FOUND", e.to_string()),
        },
        ("POST", ["deployments"]) => {
            let deploy_request: DeployRequest = match serde_json::from_str(&request.body) {
                Ok(r) => r,
                Err(e) => {
                    return error_response(
                        400,
                        "E_BAD_REQUEST",
                        format!("invalid deployment request: {e}"),
                    )
                }
            };
            let record = deployer.deploy(&deploy_request.spec_url, &deploy_request.credentials);
            HttpResponse::json(201, serde_json::to_string(&record).unwrap())
        }
        _ => error_response(
            404,
            "E_NOT_FOUND",
            format!("no route for {} {}", request.method, path),
        ),
    }
}
