//! Core toolchain for qsf quantum services.
//!
//! The pipeline this crate implements: an OpenAPI contract extended with
//! `x-quantum` bindings is parsed ([`contract`]), each binding's circuit is
//! ingested from a Quirk share URL or OpenQASM 2.0 text ([`ingest`]) into a
//! provider-neutral IR ([`circuit`]), executable locally on a deterministic
//! statevector simulator ([`sim`]), and the whole contract generates a
//! deployable service bundle ([`codegen`]). The runtime and deployer crates
//! build on these pieces.

pub mod circuit;
pub mod codegen;
pub mod contract;
pub mod diag;
pub mod fetch;
pub mod ingest;
pub mod prng;
pub mod sim;

pub use circuit::{CircuitIR, GateKind, GateOp};
pub use codegen::{generate_bundle, ManifestEntry, ServiceBundle};
pub use contract::{parse_spec, validate_spec, ApiSpec, EndpointDef, QuantumBinding};
pub use diag::{DiagCode, Diagnostic, Severity};
pub use fetch::{FetchError, Fetcher};
pub use sim::{run_statevector, sample_counts, ExecutionResult, SimError};
