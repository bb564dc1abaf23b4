//! Golden files for the emitters: `fixtures/emitted/` pins the exact text
//! `emit_qasm` and `emit_qiskit` produce for the Bell fixture. The Qiskit
//! text was reviewed by hand against the Qiskit API (QuantumCircuit,
//! gate-call and measure signatures, AerSimulator run flow) — it is an
//! emitted artifact only and is never executed here.
//!
//! Regenerate after an intentional emitter change with:
//! `cargo test -p qsf-core --test emitted_golden -- --ignored regenerate`

use qsf_core::codegen::{emit_qasm, emit_qiskit};
use qsf_core::CircuitIR;
use qsf_testkit::fixtures_dir;
use qsf_testkit::irtext::parse_ir_text;

fn bell() -> CircuitIR {
    let text = std::fs::read_to_string(fixtures_dir().join("ir/bell.ir")).unwrap();
    parse_ir_text(&text).unwrap()
}

#[test]
fn emitted_qasm_matches_golden() {
    let expected = std::fs::read_to_string(fixtures_dir().join("emitted/bell.qasm"))
        .expect("golden bell.qasm");
    assert_eq!(emit_qasm(&bell()).unwrap(), expected);
}

#[test]
fn emitted_qiskit_matches_golden() {
    let expected = std::fs::read_to_string(fixtures_dir().join("emitted/bell_qiskit.py.txt"))
        .expect("golden bell_qiskit.py.txt");
    assert_eq!(emit_qiskit(&bell(), "bell").unwrap(), expected);
}

#[test]
#[ignore = "writes fixtures; run explicitly after intentional emitter changes"]
fn regenerate() {
    let dir = fixtures_dir().join("emitted");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("bell.qasm"), emit_qasm(&bell()).unwrap()).unwrap();
    std::fs::write(
        dir.join("bell_qiskit.py.txt"),
        emit_qiskit(&bell(), "bell").unwrap(),
    )
    .unwrap();
}
