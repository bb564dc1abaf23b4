//! Service generation: turns a validated contract into a deployable
//! [`ServiceBundle`] — a manifest binding each endpoint to its ingested
//! circuit, plus emitted source artifacts (OpenQASM 2.0, Qiskit-flavored
//! Python, and the effective contract). Output is deterministic: the same
//! contract text and fetched resources always produce byte-identical
//! bundles.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::circuit::{CircuitIR, GateKind};
use crate::contract::{self, ApiSpec};
use crate::diag::{DiagCode, Diagnostic};
use crate::fetch::Fetcher;

/// Version stamped into emitted artifacts.
pub const GENERATOR_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmitError {
    #[error("operation {index} ({kind}) not representable in the emitted subset: {reason}")]
    Unrepresentable {
        index: usize,
        kind: GateKind,
        reason: &'static str,
    },
}

/// One deployable endpoint: routing info plus the normalized circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub method: String,
    pub operation_id: String,
    pub circuit: CircuitIR,
    pub default_shots: u64,
    pub backend: String,
}

/// The generated service: manifest plus emitted source texts, fingerprinted
/// by the SHA-256 of the source contract bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceBundle {
    pub manifest: Vec<ManifestEntry>,
    pub emitted: BTreeMap<String, String>,
    pub spec_fingerprint: String,
}

/// SHA-256 of the raw contract text, hex-encoded.
pub fn spec_fingerprint(source_yaml: &str) -> String {
    hex::encode(Sha256::digest(source_yaml.as_bytes()))
}

/// Emits an OpenQASM 2.0 program for the circuit. `parse_qasm` of the output
/// reproduces the circuit exactly; emission fails for control patterns the
/// QASM subset cannot spell (negative controls, controls on non-X gates,
/// more than two controls).
pub fn emit_qasm(circuit: &CircuitIR) -> Result<String, EmitError> {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", circuit.num_qubits));
    let measured = circuit.measured_sorted();
    if !measured.is_empty() {
        out.push_str(&format!("creg c[{}];\n", measured.len()));
    }
    for (index, op) in circuit.ops.iter().enumerate() {
        out.push_str(&render_gate_line(index, op)?);
    }
    for (cbit, qubit) in measured.iter().enumerate() {
        out.push_str(&format!("measure q[{qubit}] -> c[{cbit}];\n"));
    }
    Ok(out)
}

fn render_gate_line(index: usize, op: &crate::circuit::GateOp) -> Result<String, EmitError> {
    let unrepresentable = |reason: &'static str| EmitError::Unrepresentable {
        index,
        kind: op.kind,
        reason,
    };
    if !op.neg_controls.is_empty() {
        return Err(unrepresentable(
            "negative controls have no QASM 2.0 spelling here",
        ));
    }
    let controls: Vec<usize> = op.pos_controls.iter().copied().collect();
    match (op.kind, controls.len()) {
        (GateKind::Swap, 0) => Ok(format!("swap q[{}],q[{}];\n", op.targets[0], op.targets[1])),
        (kind, 0) => Ok(format!("{} q[{}];\n", gate_mnemonic(kind), op.targets[0])),
        (GateKind::X, 1) => Ok(format!("cx q[{}],q[{}];\n", controls[0], op.targets[0])),
        (GateKind::X, 2) => Ok(format!(
            "ccx q[{}],q[{}],q[{}];\n",
            controls[0], controls[1], op.targets[0]
        )),
        (GateKind::X, _) => Err(unrepresentable("X supports at most two controls (cx/ccx)")),
        _ => Err(unrepresentable("controls are only emittable on X (cx/ccx)")),
    }
}

fn gate_mnemonic(kind: GateKind) -> &'static str {
    match kind {
        GateKind::H => "h",
        GateKind::X => "x",
        GateKind::Y => "y",
        GateKind::Z => "z",
        GateKind::S => "s",
        GateKind::T => "t",
        GateKind::Swap => "swap",
    }
}

/// Emits a self-contained Qiskit-style source text defining
/// `<operation_id>(shots)` which builds the circuit and returns counts.
///
/// The text is an emitted artifact only — the toolchain never executes it;
/// tests compare it against reviewed golden files. Representability rules
/// match [`emit_qasm`].
pub fn emit_qiskit(circuit: &CircuitIR, operation_id: &str) -> Result<String, EmitError> {
    let measured = circuit.measured_sorted();
    let mut body = String::new();
    for (index, op) in circuit.ops.iter().enumerate() {
        // Reuse the QASM representability gate so the two emitters accept
        // exactly the same circuits.
        render_gate_line(index, op)?;
        let controls: Vec<usize> = op.pos_controls.iter().copied().collect();
        let call = match (op.kind, controls.len()) {
            (GateKind::Swap, 0) => format!("qc.swap({}, {})", op.targets[0], op.targets[1]),
            (GateKind::X, 1) => format!("qc.cx({}, {})", controls[0], op.targets[0]),
            (GateKind::X, 2) => {
                format!(
                    "qc.ccx({}, {}, {})",
                    controls[0], controls[1], op.targets[0]
                )
            }
            (kind, _) => format!("qc.{}({})", gate_mnemonic(kind), op.targets[0]),
        };
        body.push_str(&format!("    {call}\n"));
    }
    for (cbit, qubit) in measured.iter().enumerate() {
        body.push_str(&format!("    qc.measure({qubit}, {cbit})\n"));
    }

    Ok(format!(
        "# Generated by qsf-codegen v{version}. Do not edit.\n\
         from qiskit import QuantumCircuit, transpile\n\
         from qiskit_aer import AerSimulator\n\
         \n\
         \n\
         def {operation_id}(shots):\n\
         \x20   qc = QuantumCircuit({qubits}, {clbits})\n\
         {body}\
         \x20   backend = AerSimulator()\n\
         \x20   job = backend.run(transpile(qc, backend), shots=shots)\n\
         \x20   return job.result().get_counts()\n",
        version = GENERATOR_VERSION,
        operation_id = operation_id,
        qubits = circuit.num_qubits,
        clbits = measured.len(),
        body = body,
    ))
}

/// Runs the full generation pass: parse, deep-validate, ingest every
/// binding, emit per-endpoint artifacts and the effective contract.
/// All-or-nothing — any diagnostic anywhere means no bundle.
pub fn generate_bundle(
    source_yaml: &str,
    fetcher: &dyn Fetcher,
) -> Result<ServiceBundle, Vec<Diagnostic>> {
    let parsed = contract::parse_spec(source_yaml)?;
    let spec = parsed.spec;
    let circuits = contract::resolve_circuits(&spec, fetcher)?;

    let mut manifest = Vec::with_capacity(spec.endpoints.len());
    let mut emitted: BTreeMap<String, String> = BTreeMap::new();
    let mut diags: Vec<Diagnostic> = Vec::new();
    let fingerprint = spec_fingerprint(source_yaml);

    for (endpoint, circuit) in spec.endpoints.iter().zip(circuits) {
        let circuit = circuit.with_implicit_measurement();
        let loc = format!("paths.{}.post", endpoint.path);
        let qasm = match emit_qasm(&circuit) {
            Ok(text) => text,
            Err(e) => {
                diags.push(emit_diag(&loc, &e));
                continue;
            }
        };
        let qiskit = match emit_qiskit(&circuit, &endpoint.operation_id) {
            Ok(text) => text,
            Err(e) => {
                diags.push(emit_diag(&loc, &e));
                continue;
            }
        };
        emitted.insert(format!("{}.qasm", endpoint.operation_id), qasm);
        emitted.insert(
            format!("{}_qiskit.py.txt", endpoint.operation_id),
            format!("# spec-fingerprint: {fingerprint}\n{qiskit}"),
        );
        manifest.push(ManifestEntry {
            path: endpoint.path.clone(),
            method: endpoint.method.as_str().to_string(),
            operation_id: endpoint.operation_id.clone(),
            circuit,
            default_shots: endpoint.binding.default_shots,
            backend: endpoint.binding.backend.clone(),
        });
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    emitted.insert(
        "openapi.effective.yaml".to_string(),
        contract::render_spec_yaml(&spec),
    );

    Ok(ServiceBundle {
        manifest,
        emitted,
        spec_fingerprint: fingerprint,
    })
}

fn emit_diag(location: &str, err: &EmitError) -> Diagnostic {
    Diagnostic::error(
        DiagCode::QSF013,
        location,
        format!("cannot emit source: {err}"),
    )
}

/// The ApiSpec a bundle was generated from, recovered from the effective
/// contract artifact.
pub fn bundle_spec(bundle: &ServiceBundle) -> Option<ApiSpec> {
    let text = bundle.emitted.get("openapi.effective.yaml")?;
    contract::parse_spec(text).ok().map(|p| p.spec)
}

// --- bundle serialization -------------------------------------------------
//
// Two interchangeable forms, both described by docs/bundle.schema.json:
// a directory tree (manifest.json + artifacts/) and a single JSON document.

#[derive(Serialize, Deserialize)]
struct ManifestFile {
    spec_fingerprint: String,
    endpoints: Vec<ManifestEntry>,
}

/// Writes `manifest.json` plus one file per artifact under `artifacts/`.
pub fn write_bundle_dir(bundle: &ServiceBundle, dir: &Path) -> std::io::Result<()> {
    let artifacts = dir.join("artifacts");
    std::fs::create_dir_all(&artifacts)?;
    let manifest = ManifestFile {
        spec_fingerprint: bundle.spec_fingerprint.clone(),
        endpoints: bundle.manifest.clone(),
    };
    let mut manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    manifest_json.push('\n');
    std::fs::write(dir.join("manifest.json"), manifest_json)?;
    for (name, text) in &bundle.emitted {
        std::fs::write(artifacts.join(name), text)?;
    }
    Ok(())
}

/// Reads a bundle directory back. Artifact names come from the directory
/// listing, sorted, so the round trip is exact.
pub fn read_bundle_dir(dir: &Path) -> std::io::Result<ServiceBundle> {
    let manifest_text = std::fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: ManifestFile =
        serde_json::from_str(&manifest_text).map_err(std::io::Error::other)?;
    let mut emitted = BTreeMap::new();
    let artifacts = dir.join("artifacts");
    if artifacts.is_dir() {
        for entry in std::fs::read_dir(&artifacts)? {
            let entry = entry?;
            if entry.file_type()?.is_file() {
                let name = entry.file_name().to_string_lossy().into_owned();
                emitted.insert(name, std::fs::read_to_string(entry.path())?);
            }
        }
    }
    Ok(ServiceBundle {
        manifest: manifest.endpoints,
        emitted,
        spec_fingerprint: manifest.spec_fingerprint,
    })
}
