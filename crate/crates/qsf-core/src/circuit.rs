//! Provider-neutral circuit representation.
//!
//! `CircuitIR` is what every ingestion path produces and every backend
//! consumes: a qubit count, an ordered list of controlled gate operations,
//! and the set of measured qubits. Both Quirk lowering and QASM parsing
//! normalize into this form, so structural equality across ingestion paths
//! is meaningful.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Execution ceiling of the bundled statevector simulator. Circuits above
/// this are representable but rejected when executed locally.
pub const MAX_SIM_QUBITS: usize = 24;

/// The supported gate alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Swap,
}

impl GateKind {
    pub fn target_count(self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Swap => "SWAP",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate application: targets plus positive/negative control sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub pos_controls: BTreeSet<usize>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub neg_controls: BTreeSet<usize>,
}

impl GateOp {
    pub fn single(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            targets: vec![target],
            pos_controls: BTreeSet::new(),
            neg_controls: BTreeSet::new(),
        }
    }

    pub fn controlled(kind: GateKind, target: usize, pos: impl IntoIterator<Item = usize>) -> Self {
        Self {
            kind,
            targets: vec![target],
            pos_controls: pos.into_iter().collect(),
            neg_controls: BTreeSet::new(),
        }
    }

    /// Swap targets are stored in ascending order so that structurally equal
    /// circuits compare equal regardless of how the source spelled them.
    pub fn swap(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Swap,
            targets: vec![a.min(b), a.max(b)],
            pos_controls: BTreeSet::new(),
            neg_controls: BTreeSet::new(),
        }
    }

    pub fn with_neg_controls(mut self, neg: impl IntoIterator<Item = usize>) -> Self {
        self.neg_controls = neg.into_iter().collect();
        self
    }

    fn max_index(&self) -> usize {
        self.targets
            .iter()
            .chain(self.pos_controls.iter())
            .chain(self.neg_controls.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("qubit index {index} out of range for {num_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("{kind} expects {expected} target(s), got {got}")]
    BadTargetCount {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("targets and controls of one operation must be disjoint")]
    OverlappingOperands,
}

/// A complete circuit: qubit count, ordered operations, measured-qubit set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub num_qubits: usize,
    pub ops: Vec<GateOp>,
    pub measured: BTreeSet<usize>,
}

impl CircuitIR {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
            measured: BTreeSet::new(),
        }
    }

    /// Checks the structural invariants: at least one qubit, every index in
    /// range, target arity matching the gate kind, and operand disjointness.
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        for op in &self.ops {
            let expected = op.kind.target_count();
            if op.targets.len() != expected {
                return Err(CircuitError::BadTargetCount {
                    kind: op.kind,
                    expected,
                    got: op.targets.len(),
                });
            }
            if op.max_index() >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    index: op.max_index(),
                    num_qubits: self.num_qubits,
                });
            }
            let mut seen = BTreeSet::new();
            for &t in &op.targets {
                if !seen.insert(t) {
                    return Err(CircuitError::OverlappingOperands);
                }
            }
            for &c in op.pos_controls.iter().chain(op.neg_controls.iter()) {
                if !seen.insert(c) {
                    return Err(CircuitError::OverlappingOperands);
                }
            }
        }
        for &m in &self.measured {
            if m >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    index: m,
                    num_qubits: self.num_qubits,
                });
            }
        }
        Ok(())
    }

    /// Applies the implicit-measurement rule: a circuit with no explicit
    /// measurement measures every qubit at the end (a service must return
    /// counts for something).
    pub fn with_implicit_measurement(mut self) -> Self {
        if self.measured.is_empty() {
            self.measured = (0..self.num_qubits).collect();
        }
        self
    }

    /// Measured qubits in ascending order; index in this list is the
    /// classical bit position (bit 0 is the rightmost bitstring character).
    pub fn measured_sorted(&self) -> Vec<usize> {
        self.measured.iter().copied().collect()
    }
}
