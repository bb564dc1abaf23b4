//! Test-only support shared by the workspace test suites.
//!
//! The centerpiece is [`oracle`]: a brute-force dense-matrix simulator that
//! never shares code with the production kernels, used to cross-check the
//! statevector implementation. Also here: seeded random circuit generation,
//! the line-oriented expected-IR fixture format, and small network helpers.

pub mod irtext;
pub mod oracle;

// Re-exported so dependent test suites can name Rng traits without pinning
// their own copy of the crate.
pub use rand;

use std::net::TcpListener;
use std::path::PathBuf;

use qsf_core::circuit::{CircuitIR, GateKind, GateOp};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Workspace fixture directory (compile-time constant path).
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

/// Binds port 0 to let the OS pick a free port, then releases it.
pub fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .expect("bind ephemeral port")
        .local_addr()
        .unwrap()
        .port()
}

/// Knobs for random circuit generation.
#[derive(Debug, Clone)]
pub struct CircuitShape {
    pub num_qubits: usize,
    pub depth: usize,
    /// Allow negative controls (not representable by the QASM emitter).
    pub neg_controls: bool,
    /// Restrict control patterns to what `emit_qasm` can spell.
    pub emittable_only: bool,
}

impl CircuitShape {
    pub fn free(num_qubits: usize, depth: usize) -> Self {
        Self {
            num_qubits,
            depth,
            neg_controls: true,
            emittable_only: false,
        }
    }

    pub fn emittable(num_qubits: usize, depth: usize) -> Self {
        Self {
            num_qubits,
            depth,
            neg_controls: false,
            emittable_only: true,
        }
    }
}

/// Deterministic random circuit for property tests: `depth` operations over
/// the full gate alphabet with random control sets.
pub fn random_circuit(rng: &mut StdRng, shape: &CircuitShape) -> CircuitIR {
    let n = shape.num_qubits;
    let kinds = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Swap,
    ];
    let mut ops = Vec::with_capacity(shape.depth);
    for _ in 0..shape.depth {
        let kind = loop {
            let k = kinds[rng.random_range(0..kinds.len())];
            // Swap needs two distinct targets.
            if k != GateKind::Swap || n >= 2 {
                break k;
            }
        };
        let mut free: Vec<usize> = (0..n).collect();
        let take = |free: &mut Vec<usize>, rng: &mut StdRng| -> usize {
            free.swap_remove(rng.random_range(0..free.len()))
        };
        let mut op = match kind {
            GateKind::Swap => {
                let a = take(&mut free, rng);
                let b = take(&mut free, rng);
                GateOp::swap(a, b)
            }
            k => GateOp::single(k, take(&mut free, rng)),
        };
        let max_controls = if shape.emittable_only {
            if kind == GateKind::X {
                2.min(free.len())
            } else {
                0
            }
        } else {
            free.len()
        };
        if max_controls > 0 {
            let n_controls = rng.random_range(0..=max_controls);
            for _ in 0..n_controls {
                let c = take(&mut free, rng);
                if !shape.emittable_only && shape.neg_controls && rng.random_bool(0.3) {
                    op.neg_controls.insert(c);
                } else {
                    op.pos_controls.insert(c);
                }
            }
        }
        ops.push(op);
    }
    let measured = (0..n).filter(|_| rng.random_bool(0.8)).collect();
    CircuitIR {
        num_qubits: n,
        ops,
        measured,
    }
}

/// Convenience: seeded generator for reproducible suites.
pub fn seeded_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
