//! Property tests: the in-place kernels against the dense-matrix oracle,
//! algebraic gate identities, sampling determinism and conservation, parser
//! totality, and contract round-trips.

use proptest::prelude::*;
use qsf_core::circuit::{CircuitIR, GateKind, GateOp};
use qsf_core::codegen::emit_qasm;
use qsf_core::contract::{parse_spec, render_spec_yaml, validate_spec};
use qsf_core::fetch::MapFetcher;
use qsf_core::ingest::parse_qasm;
use qsf_core::sim::{run_statevector, sample_counts};
use qsf_testkit::{oracle, random_circuit, seeded_rng, CircuitShape};

#[test]
fn kernels_match_dense_oracle_on_random_circuits() {
    let mut rng = seeded_rng(0x5EED);
    for case in 0..200 {
        let circuit = random_circuit(&mut rng, &CircuitShape::free(3, 5));
        let fast = run_statevector(&circuit).expect("simulate");
        let dense = oracle::run_dense(&circuit);
        let distance = oracle::max_distance(&fast, &dense);
        assert!(
            distance < 1e-9,
            "case {case}: distance {distance}\n{circuit:?}"
        );
    }
}

#[test]
fn involutions_restore_the_state() {
    let involutions = [GateKind::H, GateKind::X, GateKind::Y, GateKind::Z];
    let mut rng = seeded_rng(42);
    for case in 0..50 {
        let prefix = random_circuit(&mut rng, &CircuitShape::free(3, 4));
        let before = run_statevector(&prefix).expect("prefix");
        // Doubling the same gate — bare, positively controlled, negatively
        // controlled — must be the identity in every variant.
        let mut controlled_swap = GateOp::swap(0, 2);
        controlled_swap.pos_controls = [1].into();
        let variants: Vec<GateOp> = involutions
            .iter()
            .flat_map(|&kind| {
                [
                    GateOp::single(kind, 1),
                    GateOp::controlled(kind, 1, [0]),
                    GateOp::single(kind, 1).with_neg_controls([2]),
                ]
            })
            .chain([GateOp::swap(0, 2), controlled_swap])
            .collect();
        for op in variants {
            let mut doubled = prefix.clone();
            doubled.ops.push(op.clone());
            doubled.ops.push(op.clone());
            let after = run_statevector(&doubled).expect("doubled");
            let distance = oracle::max_distance(&before, &after);
            assert!(distance < 1e-10, "case {case}, {op:?}: {distance}");
        }
    }
}

#[test]
fn norm_is_preserved_after_every_op() {
    let mut rng = seeded_rng(7);
    for _ in 0..50 {
        let circuit = random_circuit(&mut rng, &CircuitShape::free(4, 6));
        let mut prefix = CircuitIR::new(circuit.num_qubits);
        for op in &circuit.ops {
            prefix.ops.push(op.clone());
            let state = run_statevector(&prefix).expect("prefix");
            let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
            assert!(
                (norm - 1.0).abs() < 1e-10,
                "norm {norm} after {:?}",
                prefix.ops
            );
        }
    }
}

#[test]
fn emittable_circuits_round_trip_through_qasm() {
    let mut rng = seeded_rng(99);
    for _ in 0..100 {
        let circuit =
            random_circuit(&mut rng, &CircuitShape::emittable(4, 6)).with_implicit_measurement();
        let text = emit_qasm(&circuit).expect("emittable circuit emits");
        assert_eq!(parse_qasm(&text).expect("emitted text parses"), circuit);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_deterministic_and_conserves_shots(
        seed in any::<u64>(),
        shots in 1u64..5000,
        gen_seed in any::<u64>(),
    ) {
        let mut rng = seeded_rng(gen_seed);
        let circuit = random_circuit(&mut rng, &CircuitShape::free(3, 4))
            .with_implicit_measurement();
        let a = sample_counts(&circuit, shots, seed).expect("sample");
        let b = sample_counts(&circuit, shots, seed).expect("resample");
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.total(), shots);
        let width = circuit.measured.len();
        prop_assert!(a.counts.keys().all(|k| k.len() == width && k.bytes().all(|b| b == b'0' || b == b'1')));
    }

    #[test]
    fn parse_spec_is_total(text in "\\PC*") {
        // Any input maps to Ok or diagnostics; never a panic.
        let _ = parse_spec(&text);
    }

    #[test]
    fn parse_spec_is_total_on_yamlish_input(
        title in "[a-zA-Z ]{0,12}",
        path in "[a-z/{}%. ]{0,12}",
        shots in any::<i64>(),
    ) {
        let doc = format!(
            "openapi: 3.0.3\ninfo: {{title: \"{title}\", version: \"1\"}}\npaths:\n  \"{path}\":\n    post:\n      operationId: op\n      x-quantum: {{inline-qasm: x, default-shots: {shots}}}\n"
        );
        let _ = parse_spec(&doc);
    }
}

#[test]
fn validation_with_resolving_fetcher_accepts_every_parsed_spec() {
    // Any spec that passed parse_spec and whose URLs resolve to a fixed valid
    // circuit validates cleanly (duplicates aside).
    let qasm = "OPENQASM 2.0;\nqreg q[1];\nh q[0];\n";
    let quirk = r#"https://algassert.com/quirk#circuit={"cols":[["H"]]}"#;
    for (i, source_block) in [
        format!("quirk-url: '{quirk}'"),
        "code-url: https://anything.test/c.qasm".to_string(),
        "inline-qasm: \"OPENQASM 2.0; qreg q[1]; h q[0];\"".to_string(),
    ]
    .iter()
    .enumerate()
    {
        let doc = format!(
            "openapi: 3.0.3\ninfo: {{title: T, version: \"1\"}}\npaths:\n  /p{i}:\n    post:\n      operationId: op{i}\n      x-quantum:\n        {source_block}\n"
        );
        let spec = parse_spec(&doc)
            .unwrap_or_else(|e| panic!("case {i}: {e:?}"))
            .spec;
        let fetcher = MapFetcher::new().with("https://anything.test/c.qasm", qasm);
        let diags = validate_spec(&spec, &fetcher);
        assert!(diags.is_empty(), "case {i}: {diags:?}");
    }
}

#[test]
fn quirk_lowering_respects_index_bounds() {
    // Random valid grids: lowered circuits must satisfy every IR invariant
    // (indices under the qubit count, operand disjointness), and the
    // rendered share URL must reproduce the document.
    use qsf_core::ingest::{lower_quirk, parse_quirk_url, render_quirk_url, QuirkDocument};
    use qsf_testkit::rand::Rng;
    let gate_tokens = ["H", "X", "Y", "Z", "S", "T", "1", "Measure"];
    let mut rng = seeded_rng(0x1D);
    for case in 0..200 {
        let rows = rng.random_range(1..=4);
        let cols = rng.random_range(0..5);
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut measured_rows: Vec<bool> = vec![false; rows];
        for _ in 0..cols {
            let mut column = Vec::new();
            let mut wrote_gate = false;
            for row_measured in measured_rows.iter_mut().take(rows) {
                let token = if *row_measured {
                    "1"
                } else {
                    gate_tokens[rng.random_range(0..gate_tokens.len())]
                };
                if token == "Measure" {
                    *row_measured = true;
                }
                if !matches!(token, "1" | "Measure") {
                    wrote_gate = true;
                }
                column.push(token.to_string());
            }
            // One optional control, only when the column has a target and
            // an idle, not-yet-measured wire to host it.
            if wrote_gate && rows > 1 && rng.random_bool(0.5) {
                let slot = (0..rows).find(|&i| column[i] == "1" && !measured_rows[i]);
                if let Some(i) = slot {
                    column[i] = "•".to_string();
                }
            }
            grid.push(column);
        }
        let doc = QuirkDocument { cols: grid };
        let circuit = match lower_quirk(&doc) {
            Ok(c) => c,
            Err(e) => panic!("case {case}: generated grid should lower: {e}\n{doc:?}"),
        };
        circuit
            .validate()
            .unwrap_or_else(|e| panic!("case {case}: {e}\n{circuit:?}"));
        let expected_qubits = if cols == 0 { 1 } else { rows };
        assert_eq!(
            circuit.num_qubits, expected_qubits,
            "case {case}: wire count"
        );
        let url = render_quirk_url(&doc);
        assert_eq!(
            parse_quirk_url(&url).expect("rendered URL parses"),
            doc,
            "case {case}"
        );
    }
}

#[test]
fn code_url_fixture_resolves_through_the_fetcher() {
    let doc = std::fs::read_to_string(qsf_testkit::fixtures_dir().join("specs/code-url.yaml"))
        .expect("fixture");
    let spec = parse_spec(&doc).expect("parses").spec;
    let ghz3 = std::fs::read_to_string(qsf_testkit::fixtures_dir().join("qasm/ghz3.qasm")).unwrap();
    let fetcher = MapFetcher::new().with("https://circuits.example/ghz3.qasm", ghz3);
    assert!(validate_spec(&spec, &fetcher).is_empty());

    let bundle = qsf_core::codegen::generate_bundle(&doc, &fetcher).expect("bundle");
    assert_eq!(bundle.manifest.len(), 1);
    assert_eq!(bundle.manifest[0].circuit.num_qubits, 3);
}

#[test]
fn contract_round_trip_is_stable() {
    let doc = std::fs::read_to_string(qsf_testkit::fixtures_dir().join("specs/two-endpoint.yaml"))
        .expect("fixture");
    let first = parse_spec(&doc).expect("fixture parses").spec;
    let rendered = render_spec_yaml(&first);
    let second = parse_spec(&rendered).expect("rendered parses").spec;
    assert_eq!(first, second);
    assert_eq!(rendered, render_spec_yaml(&second));
}
