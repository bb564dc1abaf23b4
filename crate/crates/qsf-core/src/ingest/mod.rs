//! Circuit ingestion: Quirk share-URLs and OpenQASM 2.0 text both lower into
//! [`CircuitIR`](crate::circuit::CircuitIR). The two paths are required to
//! agree — a fixture circuit available in both forms must produce
//! structurally identical IR.

mod qasm;
mod quirk;

pub use qasm::parse_qasm;
pub use quirk::{lower_quirk, parse_quirk_url, quirk_circuit, render_quirk_url, QuirkDocument};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    // -- Quirk URL decoding --
    #[error("URL has no '#circuit=' fragment")]
    NoFragment,
    #[error("circuit fragment is not valid JSON: {0}")]
    BadJson(String),
    #[error("circuit JSON has the wrong shape: {0}")]
    BadShape(String),

    // -- Quirk lowering --
    #[error("unsupported gate token {token:?} at column {column}, row {row}")]
    UnsupportedGate {
        token: String,
        column: usize,
        row: usize,
    },
    #[error("column {column} must contain exactly two Swap cells")]
    LonelySwap { column: usize },
    #[error("column {column} has controls but no gate to apply them to")]
    ControlOnlyColumn { column: usize },
    #[error("operation on qubit {qubit} which was already measured")]
    OpAfterMeasure { qubit: usize },

    // -- OpenQASM parsing --
    #[error("QASM syntax error on line {line}: {message}")]
    QasmSyntax { line: usize, message: String },
    #[error("unsupported QASM construct '{construct}' on line {line}")]
    QasmUnsupported { construct: String, line: usize },
    #[error("register index out of range on line {line}: {message}")]
    QasmIndex { line: usize, message: String },
}
