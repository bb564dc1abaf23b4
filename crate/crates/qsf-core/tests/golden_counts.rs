//! Golden count files: `fixtures/counts/<name>.<seed>.json` hold the exact
//! canonical JSON the sampler must produce for a pinned (circuit, shots,
//! seed). Any change to the PRNG, the CDF walk, the marginalization order or
//! the JSON shape breaks these byte comparisons — which is the point.
//!
//! Regenerate after an intentional contract change with:
//! `cargo test -p qsf-core --test golden_counts -- --ignored regenerate`

use qsf_core::sim::sample_counts;
use qsf_core::CircuitIR;
use qsf_testkit::fixtures_dir;
use qsf_testkit::irtext::parse_ir_text;

const GOLDEN: &[(&str, u64, u64)] = &[("bell", 10_000, 7), ("ghz3", 1000, 9), ("x_only", 100, 1)];

fn fixture_circuit(name: &str) -> CircuitIR {
    let path = fixtures_dir().join(format!("ir/{name}.ir"));
    parse_ir_text(&std::fs::read_to_string(path).expect(name)).expect(name)
}

fn golden_path(name: &str, seed: u64) -> std::path::PathBuf {
    fixtures_dir().join(format!("counts/{name}.{seed}.json"))
}

#[test]
fn sampled_counts_match_golden_files_byte_for_byte() {
    for &(name, shots, seed) in GOLDEN {
        let result = sample_counts(&fixture_circuit(name), shots, seed).expect(name);
        let expected = std::fs::read_to_string(golden_path(name, seed))
            .unwrap_or_else(|e| panic!("{name}: missing golden file ({e})"));
        assert_eq!(
            format!("{}\n", result.to_canonical_json()),
            expected,
            "{name}: counts diverge from golden file"
        );
    }
}

#[test]
fn golden_totals_conserve_shots() {
    for &(name, shots, seed) in GOLDEN {
        let result = sample_counts(&fixture_circuit(name), shots, seed).expect(name);
        assert_eq!(result.total(), shots, "{name} seed {seed}");
    }
}

/// Writer for the files the test above compares. Ignored in normal runs.
#[test]
#[ignore = "writes fixtures; run explicitly after intentional sampling changes"]
fn regenerate() {
    for &(name, shots, seed) in GOLDEN {
        let result = sample_counts(&fixture_circuit(name), shots, seed).expect(name);
        let path = golden_path(name, seed);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, format!("{}\n", result.to_canonical_json())).unwrap();
        println!("wrote {}", path.display());
    }
}
