//! Cross-path fixture tests: every circuit captured in both Quirk-URL and
//! OpenQASM form must ingest to identical IR, match its expected-IR file,
//! and survive the emit → parse round trip without drifting semantically.

use qsf_core::codegen::emit_qasm;
use qsf_core::ingest::{parse_qasm, parse_quirk_url, quirk_circuit, render_quirk_url};
use qsf_core::sim::run_statevector;
use qsf_testkit::irtext::parse_ir_text;
use qsf_testkit::{fixtures_dir, oracle};

const PAIRED: &[&str] = &[
    "bell",
    "ghz3",
    "x_only",
    "swap_pair",
    "phase_mix",
    "toffoli",
];

fn read(rel: &str) -> String {
    let path = fixtures_dir().join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn quirk_and_qasm_paths_agree_with_expected_ir() {
    for name in PAIRED {
        let expected = parse_ir_text(&read(&format!("ir/{name}.ir"))).expect(name);
        let from_quirk = quirk_circuit(read(&format!("quirk/{name}.url")).trim()).expect(name);
        let from_qasm = parse_qasm(&read(&format!("qasm/{name}.qasm"))).expect(name);
        assert_eq!(
            from_quirk, expected,
            "{name}: quirk ingestion diverges from expected IR"
        );
        assert_eq!(
            from_qasm, expected,
            "{name}: qasm ingestion diverges from expected IR"
        );
    }
}

#[test]
fn emitted_qasm_round_trips_every_fixture() {
    for name in PAIRED {
        let circuit = parse_ir_text(&read(&format!("ir/{name}.ir"))).expect(name);
        let emitted = emit_qasm(&circuit).expect(name);
        let reparsed = parse_qasm(&emitted).expect(name);
        assert_eq!(
            reparsed, circuit,
            "{name}: emit → parse is not the identity"
        );
    }
}

#[test]
fn round_trip_preserves_statevector() {
    for name in PAIRED {
        let circuit = parse_ir_text(&read(&format!("ir/{name}.ir"))).expect(name);
        let emitted = emit_qasm(&circuit).expect(name);
        let reparsed = parse_qasm(&emitted).expect(name);
        let direct = run_statevector(&circuit).expect(name);
        let via_text = run_statevector(&reparsed).expect(name);
        let distance = oracle::max_distance(&direct, &via_text);
        assert!(distance < 1e-12, "{name}: statevector drift {distance}");
    }
}

#[test]
fn fixture_urls_round_trip_through_renderer() {
    for name in PAIRED {
        let url = read(&format!("quirk/{name}.url"));
        let doc = parse_quirk_url(url.trim()).expect(name);
        let rendered = render_quirk_url(&doc);
        assert_eq!(parse_quirk_url(&rendered).expect(name), doc, "{name}");
    }
}
