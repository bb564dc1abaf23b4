//! Parallel vs sequential simulator kernels.
//!
//! `cargo bench -p qsf-core` compares the rayon block-parallel gate
//! application against the plain sequential loops at several circuit sizes,
//! plus the sampling path. With `--no-default-features` only the sequential
//! mode exists (Parallel degrades to it), so the comparison collapses —
//! bench the default build.

use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qsf_core::circuit::{CircuitIR, GateKind, GateOp};
use qsf_core::sim::{run_statevector_mode, sample_counts_mode, ExecMode};

/// Layered circuit: a Hadamard wall, a CX ladder, and a phase layer,
/// repeated. Dense enough that every amplitude is touched per layer.
fn layered_circuit(num_qubits: usize, layers: usize) -> CircuitIR {
    let mut ops = Vec::new();
    for layer in 0..layers {
        for q in 0..num_qubits {
            ops.push(GateOp::single(GateKind::H, q));
        }
        for q in 0..num_qubits - 1 {
            ops.push(GateOp::controlled(GateKind::X, q + 1, [q]));
        }
        let phase = if layer % 2 == 0 {
            GateKind::T
        } else {
            GateKind::S
        };
        for q in 0..num_qubits {
            ops.push(GateOp::single(phase, q));
        }
    }
    CircuitIR {
        num_qubits,
        ops,
        measured: (0..num_qubits).collect::<BTreeSet<_>>(),
    }
}

fn bench_statevector(c: &mut Criterion) {
    let mut group = c.benchmark_group("statevector");
    for &num_qubits in &[10usize, 14, 18] {
        let circuit = layered_circuit(num_qubits, 4);
        group.bench_with_input(
            BenchmarkId::new("sequential", num_qubits),
            &circuit,
            |b, circuit| b.iter(|| run_statevector_mode(black_box(circuit), ExecMode::Sequential)),
        );
        group.bench_with_input(
            BenchmarkId::new("parallel", num_qubits),
            &circuit,
            |b, circuit| b.iter(|| run_statevector_mode(black_box(circuit), ExecMode::Parallel)),
        );
    }
    group.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampling");
    group.sample_size(20);
    let circuit = layered_circuit(12, 3);
    for &shots in &[10_000u64, 200_000] {
        group.bench_with_input(
            BenchmarkId::new("sequential", shots),
            &shots,
            |b, &shots| {
                b.iter(|| sample_counts_mode(black_box(&circuit), shots, 7, ExecMode::Sequential))
            },
        );
        group.bench_with_input(BenchmarkId::new("parallel", shots), &shots, |b, &shots| {
            b.iter(|| sample_counts_mode(black_box(&circuit), shots, 7, ExecMode::Parallel))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_statevector, bench_sampling);
criterion_main!(benches);
