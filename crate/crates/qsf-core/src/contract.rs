//! The extended OpenAPI contract: parsing, deep validation and rendering.
//!
//! A service contract is an ordinary OpenAPI 3.x skeleton where each POST
//! operation carries an `x-quantum` vendor extension binding it to a circuit
//! source (Quirk share URL, fetched OpenQASM 2.0, or inline OpenQASM 2.0)
//! plus execution defaults. See `docs/spec-extension.md` for the field
//! reference and the diagnostic code table.
//!
//! Parsing is total: every failure becomes a [`Diagnostic`], all of them are
//! collected in document order before returning, and no input text panics.

use std::collections::BTreeSet;

use serde_yaml::Value;

use crate::circuit::CircuitIR;
use crate::diag::{has_errors, DiagCode, Diagnostic};
use crate::fetch::Fetcher;
use crate::ingest::{self, IngestError};
use crate::sim::LOCAL_BACKEND_ID;

pub const DEFAULT_SHOTS: u64 = 1024;
pub const MAX_SHOTS: u64 = 1_000_000;

/// Code formats accepted in `code-format`. `qiskit` parses but cannot be
/// ingested; the validator reports the limitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeFormat {
    Qasm2,
    Qiskit,
}

impl CodeFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeFormat::Qasm2 => "qasm2",
            CodeFormat::Qiskit => "qiskit",
        }
    }
}

/// Exactly one circuit source per endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitSource {
    QuirkUrl(String),
    CodeUrl { url: String, format: CodeFormat },
    InlineQasm(String),
}

/// Per-endpoint execution binding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumBinding {
    pub source: CircuitSource,
    pub default_shots: u64,
    pub backend: String,
}

/// Only POST is served in v1; circuit execution is not idempotent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HttpMethod {
    Post,
}

impl HttpMethod {
    pub fn as_str(self) -> &'static str {
        "POST"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointDef {
    pub path: String,
    pub method: HttpMethod,
    pub operation_id: String,
    pub binding: QuantumBinding,
}

/// A parsed contract.
///
/// Equality compares contract structure (title, version, endpoints) and
/// ignores `source_url` provenance, so parse → render → parse round-trips
/// compare equal.
#[derive(Debug, Clone, Eq)]
pub struct ApiSpec {
    pub title: String,
    pub version: String,
    pub endpoints: Vec<EndpointDef>,
    pub source_url: Option<String>,
}

impl PartialEq for ApiSpec {
    fn eq(&self, other: &Self) -> bool {
        self.title == other.title
            && self.version == other.version
            && self.endpoints == other.endpoints
    }
}

/// Successful parse: the spec plus any warning-severity diagnostics.
#[derive(Debug, Clone)]
pub struct SpecParse {
    pub spec: ApiSpec,
    pub warnings: Vec<Diagnostic>,
}

const KNOWN_METHODS: &[&str] = &[
    "get", "post", "put", "delete", "patch", "head", "options", "trace",
];
const KNOWN_XQ_KEYS: &[&str] = &[
    "quirk-url",
    "code-url",
    "code-format",
    "inline-qasm",
    "default-shots",
    "backend",
];

fn valid_path(path: &str) -> bool {
    path.starts_with('/')
        && path
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '_' | '~' | '/'))
}

fn valid_operation_id(id: &str) -> bool {
    let mut chars = id.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Uniqueness key for (path, method): trailing slashes are ignored so that
/// "/run" and "/run/" collide instead of silently coexisting.
pub fn normalized_path(path: &str) -> String {
    let trimmed = path.trim_end_matches('/');
    if trimmed.is_empty() {
        "/".to_string()
    } else {
        trimmed.to_string()
    }
}

/// Parses a contract document, batch-reporting every diagnostic found.
/// Returns the spec (plus warnings) only when no error-severity diagnostics
/// exist; otherwise returns all diagnostics, errors and warnings alike.
pub fn parse_spec(yaml_text: &str) -> Result<SpecParse, Vec<Diagnostic>> {
    let mut diags: Vec<Diagnostic> = Vec::new();

    let root: Value = match serde_yaml::from_str(yaml_text) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic::error(
                DiagCode::QSF001,
                "document",
                format!("not valid YAML: {e}"),
            )])
        }
    };
    let Some(root_map) = root.as_mapping() else {
        return Err(vec![Diagnostic::error(
            DiagCode::QSF002,
            "document",
            "document root must be a mapping with openapi, info and paths",
        )]);
    };

    match root_map.get("openapi").and_then(Value::as_str) {
        Some(v) if v.starts_with("3.") => {}
        Some(v) => diags.push(Diagnostic::error(
            DiagCode::QSF002,
            "openapi",
            format!("unsupported openapi version {v:?}; expected 3.x"),
        )),
        None => diags.push(Diagnostic::error(
            DiagCode::QSF002,
            "openapi",
            "missing or invalid 'openapi' version field",
        )),
    }

    let mut title = String::new();
    let mut version = String::new();
    match root_map.get("info").and_then(Value::as_mapping) {
        Some(info) => {
            match info.get("title").and_then(Value::as_str) {
                Some(t) => title = t.to_string(),
                None => diags.push(Diagnostic::error(
                    DiagCode::QSF002,
                    "info.title",
                    "missing or invalid 'info.title'",
                )),
            }
            match info.get("version").and_then(Value::as_str) {
                Some(v) => version = v.to_string(),
                None => diags.push(Diagnostic::error(
                    DiagCode::QSF002,
                    "info.version",
                    "missing or invalid 'info.version'",
                )),
            }
        }
        None => diags.push(Diagnostic::error(
            DiagCode::QSF002,
            "info",
            "missing 'info' mapping",
        )),
    }

    let mut endpoints: Vec<EndpointDef> = Vec::new();
    let mut seen_operation_ids: BTreeSet<String> = BTreeSet::new();
    match root_map.get("paths").and_then(Value::as_mapping) {
        Some(paths) => {
            for (key, item) in paths {
                let Some(path) = key.as_str() else {
                    diags.push(Diagnostic::error(
                        DiagCode::QSF008,
                        "paths",
                        format!("path key {key:?} is not a string"),
                    ));
                    continue;
                };
                let loc = format!("paths.{path}");
                if !valid_path(path) {
                    let reason = if path.contains('{') || path.contains('}') {
                        "path templating is not supported; bind one circuit per literal path"
                    } else {
                        "path must start with '/' and use only unreserved URL characters"
                    };
                    diags.push(Diagnostic::error(DiagCode::QSF008, &loc, reason));
                    continue;
                }
                let Some(item_map) = item.as_mapping() else {
                    diags.push(Diagnostic::error(
                        DiagCode::QSF002,
                        &loc,
                        "path item must be a mapping of HTTP methods",
                    ));
                    continue;
                };
                for (method_key, operation) in item_map {
                    let Some(method) = method_key.as_str() else {
                        continue;
                    };
                    if !KNOWN_METHODS.contains(&method) {
                        // Standard path-item fields (summary, parameters, …)
                        // and anything else pass through untouched.
                        continue;
                    }
                    if method != "post" {
                        diags.push(Diagnostic::error(
                            DiagCode::QSF006,
                            format!("{loc}.{method}"),
                            format!("unsupported HTTP method {method:?}; quantum endpoints are POST-only"),
                        ));
                        continue;
                    }
                    parse_endpoint(
                        path,
                        operation,
                        &format!("{loc}.post"),
                        &mut diags,
                        &mut endpoints,
                        &mut seen_operation_ids,
                    );
                }
            }
            if endpoints.is_empty() && !has_errors(&diags) {
                diags.push(Diagnostic::error(
                    DiagCode::QSF002,
                    "paths",
                    "contract defines no endpoints",
                ));
            }
        }
        None => diags.push(Diagnostic::error(
            DiagCode::QSF002,
            "paths",
            "missing 'paths' mapping",
        )),
    }

    if has_errors(&diags) {
        return Err(diags);
    }
    Ok(SpecParse {
        spec: ApiSpec {
            title,
            version,
            endpoints,
            source_url: None,
        },
        warnings: diags,
    })
}

fn parse_endpoint(
    path: &str,
    operation: &Value,
    loc: &str,
    diags: &mut Vec<Diagnostic>,
    endpoints: &mut Vec<EndpointDef>,
    seen_operation_ids: &mut BTreeSet<String>,
) {
    let Some(op_map) = operation.as_mapping() else {
        diags.push(Diagnostic::error(
            DiagCode::QSF003,
            loc,
            "operation must be a mapping carrying an x-quantum binding",
        ));
        return;
    };

    let operation_id = match op_map.get("operationId").and_then(Value::as_str) {
        Some(id) if valid_operation_id(id) => {
            if !seen_operation_ids.insert(id.to_string()) {
                diags.push(Diagnostic::error(
                    DiagCode::QSF009,
                    format!("{loc}.operationId"),
                    format!(
                        "duplicate operationId {id:?}; generated artifact names must be unique"
                    ),
                ));
                return;
            }
            id.to_string()
        }
        Some(id) => {
            diags.push(Diagnostic::error(
                DiagCode::QSF009,
                format!("{loc}.operationId"),
                format!("operationId {id:?} is not a valid identifier"),
            ));
            return;
        }
        None => {
            diags.push(Diagnostic::error(
                DiagCode::QSF009,
                format!("{loc}.operationId"),
                "missing operationId",
            ));
            return;
        }
    };

    let xq_loc = format!("{loc}.x-quantum");
    let Some(xq) = op_map.get("x-quantum") else {
        diags.push(Diagnostic::error(
            DiagCode::QSF003,
            loc,
            "endpoint has no x-quantum binding",
        ));
        return;
    };
    let Some(xq_map) = xq.as_mapping() else {
        diags.push(Diagnostic::error(
            DiagCode::QSF003,
            &xq_loc,
            "x-quantum must be a mapping",
        ));
        return;
    };

    for (key, _) in xq_map {
        if let Some(k) = key.as_str() {
            if !KNOWN_XQ_KEYS.contains(&k) {
                diags.push(Diagnostic::warning(
                    DiagCode::QSF007,
                    format!("{xq_loc}.{k}"),
                    format!("unknown x-quantum key {k:?} is ignored"),
                ));
            }
        }
    }

    let mut failed = false;
    let str_field =
        |name: &str, diags: &mut Vec<Diagnostic>, failed: &mut bool| -> Option<String> {
            match xq_map.get(name) {
                None => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(_) => {
                    diags.push(Diagnostic::error(
                        DiagCode::QSF004,
                        format!("{xq_loc}.{name}"),
                        format!("{name} must be a string"),
                    ));
                    *failed = true;
                    None
                }
            }
        };

    let quirk_url = str_field("quirk-url", diags, &mut failed);
    let code_url = str_field("code-url", diags, &mut failed);
    let inline_qasm = str_field("inline-qasm", diags, &mut failed);
    let code_format_raw = str_field("code-format", diags, &mut failed);

    let code_format = match code_format_raw.as_deref() {
        None => CodeFormat::Qasm2,
        Some("qasm2") => CodeFormat::Qasm2,
        Some("qiskit") => CodeFormat::Qiskit,
        Some(other) => {
            diags.push(Diagnostic::error(
                DiagCode::QSF004,
                format!("{xq_loc}.code-format"),
                format!("unknown code-format {other:?}; expected qasm2 or qiskit"),
            ));
            failed = true;
            CodeFormat::Qasm2
        }
    };
    if code_format_raw.is_some() && code_url.is_none() {
        diags.push(Diagnostic::warning(
            DiagCode::QSF007,
            format!("{xq_loc}.code-format"),
            "code-format has no effect without code-url",
        ));
    }

    let sources_set = [
        quirk_url.is_some(),
        code_url.is_some(),
        inline_qasm.is_some(),
    ]
    .iter()
    .filter(|b| **b)
    .count();
    if sources_set != 1 {
        diags.push(Diagnostic::error(
            DiagCode::QSF004,
            &xq_loc,
            format!(
                "exactly one of quirk-url, code-url, inline-qasm must be set; found {sources_set}"
            ),
        ));
        return;
    }
    if failed {
        return;
    }

    let default_shots = match xq_map.get("default-shots") {
        None => DEFAULT_SHOTS,
        Some(v) => match v.as_u64() {
            Some(n) if (1..=MAX_SHOTS).contains(&n) => n,
            _ => {
                diags.push(Diagnostic::error(
                    DiagCode::QSF005,
                    format!("{xq_loc}.default-shots"),
                    format!("default-shots must be an integer in [1, {MAX_SHOTS}], got {v:?}"),
                ));
                return;
            }
        },
    };

    let backend = match xq_map.get("backend") {
        None => LOCAL_BACKEND_ID.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(v) => {
            diags.push(Diagnostic::error(
                DiagCode::QSF003,
                format!("{xq_loc}.backend"),
                format!("backend must be a string, got {v:?}"),
            ));
            return;
        }
    };

    let source = if let Some(url) = quirk_url {
        CircuitSource::QuirkUrl(url)
    } else if let Some(url) = code_url {
        CircuitSource::CodeUrl {
            url,
            format: code_format,
        }
    } else {
        CircuitSource::InlineQasm(inline_qasm.expect("one source is set"))
    };

    endpoints.push(EndpointDef {
        path: path.to_string(),
        method: HttpMethod::Post,
        operation_id,
        binding: QuantumBinding {
            source,
            default_shots,
            backend,
        },
    });
}

/// Resolves every endpoint's circuit, batch-reporting deep-validation
/// diagnostics. On success the circuits align one-to-one with
/// `spec.endpoints`.
pub fn resolve_circuits(
    spec: &ApiSpec,
    fetcher: &dyn Fetcher,
) -> Result<Vec<CircuitIR>, Vec<Diagnostic>> {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut circuits: Vec<CircuitIR> = Vec::new();
    let mut seen: BTreeSet<(String, &'static str)> = BTreeSet::new();

    for endpoint in &spec.endpoints {
        let loc = format!("paths.{}.post", endpoint.path);
        if !seen.insert((normalized_path(&endpoint.path), endpoint.method.as_str())) {
            diags.push(Diagnostic::error(
                DiagCode::QSF012,
                &loc,
                format!(
                    "duplicate endpoint: {} {}",
                    endpoint.method.as_str(),
                    endpoint.path
                ),
            ));
            continue;
        }
        let xq_loc = format!("{loc}.x-quantum");
        let circuit = match &endpoint.binding.source {
            CircuitSource::QuirkUrl(url) => ingest::quirk_circuit(url).map_err(|e| ingest_diag(&xq_loc, &e)),
            CircuitSource::InlineQasm(text) => {
                ingest::parse_qasm(text).map_err(|e| ingest_diag(&xq_loc, &e))
            }
            CircuitSource::CodeUrl { url, format } => match format {
                CodeFormat::Qiskit => Err(Diagnostic::error(
                    DiagCode::QSF011,
                    &xq_loc,
                    "code-format 'qiskit' cannot be ingested; export the circuit as OpenQASM 2.0 and use code-format 'qasm2'",
                )),
                CodeFormat::Qasm2 => match fetcher.fetch(url) {
                    Err(e) => Err(Diagnostic::error(DiagCode::QSF010, &xq_loc, e.to_string())),
                    Ok(text) => ingest::parse_qasm(&text).map_err(|e| ingest_diag(&xq_loc, &e)),
                },
            },
        };
        match circuit {
            Ok(c) => match c.validate() {
                Ok(()) => circuits.push(c),
                Err(e) => diags.push(Diagnostic::error(
                    DiagCode::QSF011,
                    &xq_loc,
                    format!("ingested circuit violates IR invariants: {e}"),
                )),
            },
            Err(d) => diags.push(d),
        }
    }

    if diags.is_empty() {
        Ok(circuits)
    } else {
        Err(diags)
    }
}

fn ingest_diag(location: &str, err: &IngestError) -> Diagnostic {
    Diagnostic::error(
        DiagCode::QSF011,
        location,
        format!("circuit ingestion failed: {err}"),
    )
}

/// Deep validation: duplicate endpoints, URL resolution, circuit ingestion.
/// An empty list means the spec is deploy-ready.
pub fn validate_spec(spec: &ApiSpec, fetcher: &dyn Fetcher) -> Vec<Diagnostic> {
    match resolve_circuits(spec, fetcher) {
        Ok(_) => Vec::new(),
        Err(diags) => diags,
    }
}

/// Renders the effective contract: the parsed structure with all defaults
/// materialized. Deterministic, and `parse_spec` of the output yields an
/// equal `ApiSpec`.
pub fn render_spec_yaml(spec: &ApiSpec) -> String {
    use serde_yaml::Mapping;

    let mut info = Mapping::new();
    info.insert("title".into(), spec.title.clone().into());
    info.insert("version".into(), spec.version.clone().into());

    let mut paths = Mapping::new();
    for endpoint in &spec.endpoints {
        let mut xq = Mapping::new();
        match &endpoint.binding.source {
            CircuitSource::QuirkUrl(url) => {
                xq.insert("quirk-url".into(), url.clone().into());
            }
            CircuitSource::CodeUrl { url, format } => {
                xq.insert("code-url".into(), url.clone().into());
                xq.insert("code-format".into(), format.as_str().into());
            }
            CircuitSource::InlineQasm(text) => {
                xq.insert("inline-qasm".into(), text.clone().into());
            }
        }
        xq.insert(
            "default-shots".into(),
            endpoint.binding.default_shots.into(),
        );
        xq.insert("backend".into(), endpoint.binding.backend.clone().into());

        let mut responses = Mapping::new();
        let mut ok_response = Mapping::new();
        ok_response.insert("description".into(), "Quantum execution counts".into());
        responses.insert("200".into(), Value::Mapping(ok_response));

        let mut operation = Mapping::new();
        operation.insert("operationId".into(), endpoint.operation_id.clone().into());
        operation.insert("x-quantum".into(), Value::Mapping(xq));
        operation.insert("responses".into(), Value::Mapping(responses));

        let mut item = Mapping::new();
        item.insert("post".into(), Value::Mapping(operation));
        paths.insert(endpoint.path.clone().into(), Value::Mapping(item));
    }

    let mut root = Mapping::new();
    root.insert("openapi".into(), "3.0.3".into());
    root.insert("info".into(), Value::Mapping(info));
    root.insert("paths".into(), Value::Mapping(paths));

    serde_yaml::to_string(&Value::Mapping(root)).expect("contract renders to YAML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fetch::MapFetcher;

    const MINIMAL: &str = r#"
openapi: 3.0.3
info:
  title: Bell
  version: 1.0.0
paths:
  /bell:
    post:
      operationId: bell
      x-quantum:
        quirk-url: 'https://algassert.com/quirk#circuit={"cols":[["H"],["•","X"]]}'
"#;

    #[test]
    fn parses_minimal_document() {
        let parsed = parse_spec(MINIMAL).expect("valid");
        assert!(parsed.warnings.is_empty());
        let spec = parsed.spec;
        assert_eq!(spec.title, "Bell");
        assert_eq!(spec.endpoints.len(), 1);
        let ep = &spec.endpoints[0];
        assert_eq!(ep.path, "/bell");
        assert_eq!(ep.operation_id, "bell");
        assert_eq!(ep.binding.default_shots, DEFAULT_SHOTS);
        assert_eq!(ep.binding.backend, LOCAL_BACKEND_ID);
        assert!(matches!(ep.binding.source, CircuitSource::QuirkUrl(_)));
    }

    #[test]
    fn two_sources_produce_qsf004() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
      x-quantum:
        quirk-url: 'x#circuit={"cols":[]}'
        code-url: https://x.test/a.qasm
"#;
        let diags = parse_spec(doc).unwrap_err();
        assert!(
            diags.iter().any(|d| d.code == DiagCode::QSF004),
            "{diags:?}"
        );
        assert!(diags[0].location.contains("x-quantum"));
    }

    #[test]
    fn zero_shots_produce_qsf005() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
      x-quantum:
        inline-qasm: "OPENQASM 2.0; qreg q[1];"
        default-shots: 0
"#;
        let diags = parse_spec(doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::QSF005);
    }

    #[test]
    fn invalid_yaml_produces_qsf001() {
        let diags = parse_spec("{unclosed").unwrap_err();
        assert_eq!(diags[0].code, DiagCode::QSF001);
    }

    #[test]
    fn missing_skeleton_produces_qsf002() {
        let diags = parse_spec("openapi: 3.0.3\n").unwrap_err();
        assert!(diags.iter().all(|d| d.code == DiagCode::QSF002));
        assert!(diags.len() >= 2, "info and paths both missing: {diags:?}");
    }

    #[test]
    fn get_method_produces_qsf006() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    get:
      operationId: a
      x-quantum: {inline-qasm: "OPENQASM 2.0; qreg q[1];"}
"#;
        let diags = parse_spec(doc).unwrap_err();
        assert!(
            diags.iter().any(|d| d.code == DiagCode::QSF006),
            "{diags:?}"
        );
    }

    #[test]
    fn templated_path_produces_qsf008() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a/{id}:
    post:
      operationId: a
      x-quantum: {inline-qasm: "OPENQASM 2.0; qreg q[1];"}
"#;
        let diags = parse_spec(doc).unwrap_err();
        assert!(
            diags.iter().any(|d| d.code == DiagCode::QSF008),
            "{diags:?}"
        );
    }

    #[test]
    fn unknown_xq_key_is_a_warning_only() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
      x-quantum:
        inline-qasm: "OPENQASM 2.0; qreg q[1];"
        retries: 3
"#;
        let parsed = parse_spec(doc).expect("warnings only");
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.warnings[0].code, DiagCode::QSF007);
        assert_eq!(parsed.spec.endpoints.len(), 1);
    }

    #[test]
    fn missing_binding_produces_qsf003() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
"#;
        let diags = parse_spec(doc).unwrap_err();
        assert_eq!(diags[0].code, DiagCode::QSF003);
    }

    #[test]
    fn bad_operation_ids_produce_qsf009() {
        for id in ["1bad", "has space", "emoji🎇"] {
            let doc = format!(
                "openapi: 3.0.3\ninfo: {{title: T, version: \"1\"}}\npaths:\n  /a:\n    post:\n      operationId: \"{id}\"\n      x-quantum: {{inline-qasm: \"OPENQASM 2.0; qreg q[1];\"}}\n"
            );
            let diags = parse_spec(&doc).unwrap_err();
            assert!(
                diags.iter().any(|d| d.code == DiagCode::QSF009),
                "{id}: {diags:?}"
            );
        }
    }

    #[test]
    fn all_errors_are_batch_reported() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
      x-quantum: {default-shots: 9}
  /b:
    post:
      operationId: "9bad"
      x-quantum: {inline-qasm: "x"}
"#;
        let diags = parse_spec(doc).unwrap_err();
        // /a has no source (QSF004), /b has a bad operationId (QSF009).
        assert!(
            diags.iter().any(|d| d.code == DiagCode::QSF004),
            "{diags:?}"
        );
        assert!(
            diags.iter().any(|d| d.code == DiagCode::QSF009),
            "{diags:?}"
        );
    }

    #[test]
    fn validate_flags_bad_quirk_fragment() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
      x-quantum: {quirk-url: "https://algassert.com/quirk#circuit={oops"}
"#;
        let spec = parse_spec(doc).unwrap().spec;
        let diags = validate_spec(&spec, &MapFetcher::new());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::QSF011);
        assert_eq!(diags[0].location, "paths./a.post.x-quantum");
    }

    #[test]
    fn validate_flags_trailing_slash_duplicates() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /run:
    post:
      operationId: a
      x-quantum: {inline-qasm: "OPENQASM 2.0; qreg q[1];"}
  /run/:
    post:
      operationId: b
      x-quantum: {inline-qasm: "OPENQASM 2.0; qreg q[1];"}
"#;
        let spec = parse_spec(doc).unwrap().spec;
        let diags = validate_spec(&spec, &MapFetcher::new());
        assert!(
            diags.iter().any(|d| d.code == DiagCode::QSF012),
            "{diags:?}"
        );
    }

    #[test]
    fn validate_resolves_code_urls_through_fetcher() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /ghz:
    post:
      operationId: ghz
      x-quantum:
        code-url: https://circuits.test/ghz.qasm
        code-format: qasm2
"#;
        let spec = parse_spec(doc).unwrap().spec;
        let missing = validate_spec(&spec, &MapFetcher::new());
        assert_eq!(missing[0].code, DiagCode::QSF010);

        let fetcher = MapFetcher::new().with(
            "https://circuits.test/ghz.qasm",
            "OPENQASM 2.0;\nqreg q[1];\nh q[0];\n",
        );
        assert!(validate_spec(&spec, &fetcher).is_empty());
    }

    #[test]
    fn qiskit_code_format_is_rejected_at_validation() {
        let doc = r#"
openapi: 3.0.3
info: {title: T, version: "1"}
paths:
  /a:
    post:
      operationId: a
      x-quantum:
        code-url: https://circuits.test/a.py
        code-format: qiskit
"#;
        let spec = parse_spec(doc).unwrap().spec;
        let diags = validate_spec(&spec, &MapFetcher::new());
        assert_eq!(diags[0].code, DiagCode::QSF011);
        assert!(diags[0].message.contains("qasm2"), "{}", diags[0].message);
    }

    #[test]
    fn render_round_trips() {
        let doc = r#"
openapi: 3.0.3
info: {title: Mixed, version: 2.1.0}
paths:
  /bell:
    post:
      operationId: bell
      x-quantum:
        quirk-url: 'x#circuit={"cols":[["H"],["•","X"]]}'
        default-shots: 4096
  /ghz:
    post:
      operationId: ghz
      x-quantum:
        inline-qasm: |
          OPENQASM 2.0;
          qreg q[3];
          h q[0];
        backend: mock-remote
"#;
        let spec = parse_spec(doc).unwrap().spec;
        let rendered = render_spec_yaml(&spec);
        let reparsed = parse_spec(&rendered)
            .expect("rendered contract parses")
            .spec;
        assert_eq!(spec, reparsed);
        // Rendering is deterministic.
        assert_eq!(rendered, render_spec_yaml(&reparsed));
    }
}
