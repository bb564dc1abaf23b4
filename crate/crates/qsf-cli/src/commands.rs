//! Command implementations. Standard output carries machine-readable
//! results only; diagnostics and progress go to standard error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use clap::ValueEnum;

use qsf_core::codegen::{generate_bundle, write_bundle_dir, ServiceBundle};
use qsf_core::contract::{normalized_path, parse_spec, validate_spec};
use qsf_core::diag::{has_errors, Diagnostic};
use qsf_core::fetch::{Fetcher, StandardFetcher};
use qsf_deployer::{api, local_deployer, DeployerConfig, DeploymentRecord, DeploymentStatus};
use qsf_runtime::{execute_endpoint, standard_backends, RunRequest};

use crate::{EXIT_DEPLOY, EXIT_GENERATE, EXIT_IO, EXIT_OK, EXIT_VALIDATION};

pub struct Context {
    pub fetch_timeout: u64,
    pub quiet: bool,
}

impl Context {
    fn fetcher(&self) -> StandardFetcher {
        StandardFetcher::new(Duration::from_secs(self.fetch_timeout))
    }

    fn note(&self, message: &str) {
        if !self.quiet {
            eprintln!("{message}");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitFilter {
    Qasm,
    Qiskit,
    Bundle,
}

fn print_diagnostics(diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{d}");
    }
}

fn is_url(argument: &str) -> bool {
    argument.starts_with("http://")
        || argument.starts_with("https://")
        || argument.starts_with("file://")
}

/// Reads the contract text from a local path or through the fetcher.
fn read_spec_text(ctx: &Context, spec: &str) -> Result<String, u8> {
    let result = if is_url(spec) {
        ctx.fetcher().fetch(spec).map_err(|e| e.to_string())
    } else {
        std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))
    };
    result.map_err(|e| {
        eprintln!("error: cannot read contract: {e}");
        EXIT_IO
    })
}

pub fn validate(ctx: &Context, spec_arg: &str) -> u8 {
    let text = match read_spec_text(ctx, spec_arg) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let parsed = match parse_spec(&text) {
        Ok(parsed) => parsed,
        Err(diags) => {
            print_diagnostics(&diags);
            return EXIT_VALIDATION;
        }
    };
    print_diagnostics(&parsed.warnings);
    let deep = validate_spec(&parsed.spec, &ctx.fetcher());
    print_diagnostics(&deep);
    if has_errors(&deep) {
        EXIT_VALIDATION
    } else {
        ctx.note(&format!(
            "ok: {} endpoint(s) deploy-ready",
            parsed.spec.endpoints.len()
        ));
        EXIT_OK
    }
}

fn generate_in_memory(ctx: &Context, spec_arg: &str) -> Result<ServiceBundle, u8> {
    let text = read_spec_text(ctx, spec_arg)?;
    generate_bundle(&text, &ctx.fetcher()).map_err(|diags| {
        print_diagnostics(&diags);
        EXIT_VALIDATION
    })
}

pub fn generate(ctx: &Context, spec_arg: &str, out: &Path, emit: EmitFilter) -> u8 {
    let mut bundle = match generate_in_memory(ctx, spec_arg) {
        Ok(b) => b,
        Err(code) => return code,
    };
    // Regenerating over a previous bundle is fine; anything else in the
    // target directory is not ours to delete.
    if out.exists() {
        let is_bundle = out.join("manifest.json").is_file();
        let is_empty = std::fs::read_dir(out)
            .map(|mut d| d.next().is_none())
            .unwrap_or(false);
        if !is_bundle && !is_empty {
            eprintln!(
                "error: {} exists and is not a bundle directory; refusing to overwrite",
                out.display()
            );
            return EXIT_IO;
        }
        if is_bundle {
            let _ = std::fs::remove_file(out.join("manifest.json"));
            let _ = std::fs::remove_dir_all(out.join("artifacts"));
        }
    }
    bundle.emitted.retain(|name, _| match emit {
        EmitFilter::Bundle => true,
        EmitFilter::Qasm => name.ends_with(".qasm"),
        EmitFilter::Qiskit => name.ends_with("_qiskit.py.txt"),
    });
    if let Err(e) = write_bundle_dir(&bundle, out) {
        eprintln!("error: cannot write bundle to {}: {e}", out.display());
        let _ = std::fs::remove_dir_all(out);
        return EXIT_IO;
    }
    println!("{}", out.display());
    EXIT_OK
}

pub fn simulate(
    ctx: &Context,
    spec_arg: &str,
    endpoint: &str,
    shots: Option<u64>,
    seed: Option<u64>,
) -> u8 {
    let bundle = match generate_in_memory(ctx, spec_arg) {
        Ok(b) => b,
        Err(code) => return code,
    };
    let Some(entry) = bundle
        .manifest
        .iter()
        .find(|e| normalized_path(&e.path) == normalized_path(endpoint))
    else {
        let known: Vec<&str> = bundle.manifest.iter().map(|e| e.path.as_str()).collect();
        eprintln!("error: no endpoint {endpoint:?}; available: {known:?}");
        return EXIT_VALIDATION;
    };

    // Always smoke-test on the local simulator, whatever backend the
    // binding names for deployment.
    let mut entry = entry.clone();
    entry.backend = qsf_core::sim::LOCAL_BACKEND_ID.to_string();
    let backends = standard_backends(&BTreeMap::new()).expect("local backend set");
    match execute_endpoint(&entry, &RunRequest { shots, seed }, &backends) {
        Ok(result) => {
            println!("{}", result.to_canonical_json());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        }
    }
}

fn read_credentials(path: Option<&Path>) -> Result<BTreeMap<String, String>, u8> {
    let Some(path) = path else {
        return Ok(BTreeMap::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!(
            "error: cannot read credentials file {}: {e}",
            path.display()
        );
        EXIT_IO
    })?;
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: credentials file must be a JSON object of id → secret: {e}");
        EXIT_IO
    })
}

fn http_agent(ctx: &Context) -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(ctx.fetch_timeout.max(30))))
        .build()
        .into()
}

fn post_deployment(
    ctx: &Context,
    deployer_url: &str,
    spec_url: &str,
    credentials: &BTreeMap<String, String>,
) -> Result<DeploymentRecord, u8> {
    let body = serde_json::json!({ "spec_url": spec_url, "credentials": credentials });
    let url = format!("{}/deployments", deployer_url.trim_end_matches('/'));
    let mut response = http_agent(ctx)
        .post(&url)
        .send(body.to_string())
        .map_err(|e| {
            eprintln!("error: deployer unreachable at {url}: {e}");
            EXIT_DEPLOY
        })?;
    let text = response.body_mut().read_to_string().map_err(|e| {
        eprintln!("error: reading deployer response: {e}");
        EXIT_DEPLOY
    })?;
    if response.status().as_u16() >= 400 {
        eprintln!("error: deployer rejected the request: {text}");
        return Err(EXIT_DEPLOY);
    }
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: unexpected deployer response: {e}: {text}");
        EXIT_DEPLOY
    })
}

fn report_deployment(record: &DeploymentRecord) -> u8 {
    if record.status == DeploymentStatus::Running {
        EXIT_OK
    } else {
        if let Some(failure) = &record.failure {
            print_diagnostics(failure);
        }
        eprintln!("error: deployment {} is {:?}", record.id, record.status);
        EXIT_DEPLOY
    }
}

pub fn deploy(
    ctx: &Context,
    spec_url: &str,
    deployer_url: &str,
    credentials_path: Option<&Path>,
) -> u8 {
    let credentials = match read_credentials(credentials_path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let record = match post_deployment(ctx, deployer_url, spec_url, &credentials) {
        Ok(r) => r,
        Err(code) => return code,
    };
    println!(
        "{}",
        serde_json::to_string(&record).expect("record serializes")
    );
    report_deployment(&record)
}

pub fn pipeline_run(
    ctx: &Context,
    spec_arg: &str,
    deployer_url: &str,
    credentials_path: Option<&Path>,
) -> u8 {
    let credentials = match read_credentials(credentials_path) {
        Ok(c) => c,
        Err(code) => return code,
    };

    // Stage 1: validate. Failures exit before any call to the deployer.
    let text = match read_spec_text(ctx, spec_arg) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let parsed = match parse_spec(&text) {
        Ok(p) => p,
        Err(diags) => {
            print_diagnostics(&diags);
            return EXIT_VALIDATION;
        }
    };
    print_diagnostics(&parsed.warnings);
    let deep = validate_spec(&parsed.spec, &ctx.fetcher());
    if has_errors(&deep) {
        print_diagnostics(&deep);
        return EXIT_VALIDATION;
    }
    ctx.note("validate: ok");

    // Stage 2: generation dry run — catches emission-stage failures locally.
    if let Err(diags) = generate_bundle(&text, &ctx.fetcher()) {
        print_diagnostics(&diags);
        return EXIT_GENERATE;
    }
    ctx.note("generate: ok");

    // Stage 3: deploy. Local paths become file:// URLs the deployer (same
    // host) can fetch.
    let spec_url = if is_url(spec_arg) {
        spec_arg.to_string()
    } else {
        match std::fs::canonicalize(spec_arg) {
            Ok(abs) => format!("file://{}", abs.display()),
            Err(e) => {
                eprintln!("error: cannot resolve {spec_arg}: {e}");
                return EXIT_IO;
            }
        }
    };
    let record = match post_deployment(ctx, deployer_url, &spec_url, &credentials) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let code = report_deployment(&record);
    if code == EXIT_OK {
        ctx.note(&format!("deploy: ok ({})", record.id));
        println!("{}", record.base_url.as_deref().unwrap_or_default());
    }
    code
}

pub fn deployer_serve(
    ctx: &Context,
    port: u16,
    port_range: &str,
    state_dir: &Path,
    advertise_host: &str,
) -> u8 {
    let Some(range) = parse_port_range(port_range) else {
        eprintln!("error: invalid --port-range {port_range:?}; expected LO-HI");
        return EXIT_IO;
    };
    let mut config = DeployerConfig::new(state_dir);
    config.port_range = range;
    config.advertise_host = advertise_host.to_string();

    let fetcher = Box::new(ctx.fetcher());
    let deployer = match local_deployer(config, fetcher) {
        Ok(d) => std::sync::Arc::new(d),
        Err(e) => {
            eprintln!("error: cannot open state dir {}: {e}", state_dir.display());
            return EXIT_IO;
        }
    };
    let service = match api::serve(deployer, port) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot serve deployment API: {e}");
            return EXIT_IO;
        }
    };
    println!("http://127.0.0.1:{}", service.port());
    let _ = std::io::stdout().flush();
    ctx.note(&format!(
        "deployment API listening on port {}, services on {}-{}, state in {}",
        service.port(),
        range.0,
        range.1,
        state_dir.display()
    ));
    loop {
        std::thread::sleep(Duration::from_secs(3600));
    }
}

fn parse_port_range(text: &str) -> Option<(u16, u16)> {
    let (lo, hi) = text.split_once('-')?;
    let lo: u16 = lo.trim().parse().ok()?;
    let hi: u16 = hi.trim().parse().ok()?;
    (lo <= hi).then_some((lo, hi))
}
