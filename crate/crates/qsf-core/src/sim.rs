//! Deterministic statevector simulator and measurement sampling.
//!
//! This is the local execution backend for generated services and the target
//! the verification oracle checks against. Gate application walks the
//! amplitude vector in blocks so pairs of coupled amplitudes always live in
//! the same block; with the `parallel` feature the blocks are processed by
//! rayon. Sampling is specified to the bit: probabilities accumulate in
//! ascending basis-state order, each shot consumes one xoshiro256** draw,
//! and the outcome is the first CDF entry strictly above the draw — so the
//! sequential and parallel builds produce byte-identical counts.

use std::collections::BTreeMap;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CircuitError, CircuitIR, GateKind, GateOp, MAX_SIM_QUBITS};
use crate::prng::Xoshiro256StarStar;

/// Backend identifier reported by the built-in simulator.
pub const LOCAL_BACKEND_ID: &str = "local-simulator";

/// Inclusive shot bounds accepted by the sampler (mirrors the contract's
/// `default-shots` bounds).
pub const MAX_SHOTS: u64 = 1_000_000;

/// Below this statevector length the parallel path falls back to the
/// sequential loops; rayon overhead dominates on tiny circuits.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 1 << 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("circuit has {num_qubits} qubits; the simulator ceiling is {max}")]
    TooLarge { num_qubits: usize, max: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(#[from] CircuitError),
    #[error("shots must be between 1 and {MAX_SHOTS}, got {0}")]
    InvalidShots(u64),
    #[error("circuit measures no qubits; apply the implicit-measurement rule first")]
    NoMeasuredQubits,
}

/// Which execution path to use. `Parallel` degrades to the sequential loops
/// when the crate is built without the `parallel` feature, so callers can
/// name it unconditionally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl ExecMode {
    fn default_mode() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Measurement counts for one execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionResult {
    /// Bitstring → occurrences. Keys are rendered little-endian: the
    /// smallest measured qubit index is the rightmost character.
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
    pub backend: String,
}

impl ExecutionResult {
    /// Compact JSON with lexicographically ordered count keys; this is the
    /// canonical form golden files and service responses use.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("ExecutionResult serializes")
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Runs the circuit from |0…0⟩ and returns the final amplitude vector.
pub fn run_statevector(circuit: &CircuitIR) -> Result<Vec<Complex64>, SimError> {
    run_statevector_mode(circuit, ExecMode::default_mode())
}

pub fn run_statevector_mode(
    circuit: &CircuitIR,
    mode: ExecMode,
) -> Result<Vec<Complex64>, SimError> {
    circuit.validate()?;
    if circuit.num_qubits > MAX_SIM_QUBITS {
        return Err(SimError::TooLarge {
            num_qubits: circuit.num_qubits,
            max: MAX_SIM_QUBITS,
        });
    }
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << circuit.num_qubits];
    state[0] = Complex64::new(1.0, 0.0);
    for op in &circuit.ops {
        apply_op(&mut state, op, mode);
    }
    Ok(state)
}

/// Samples measurement outcomes. Identical `(circuit, shots, seed)` always
/// produce identical counts, in both execution modes.
pub fn sample_counts(
    circuit: &CircuitIR,
    shots: u64,
    seed: u64,
) -> Result<ExecutionResult, SimError> {
    sample_counts_mode(circuit, shots, seed, ExecMode::default_mode())
}

pub fn sample_counts_mode(
    circuit: &CircuitIR,
    shots: u64,
    seed: u64,
    mode: ExecMode,
) -> Result<ExecutionResult, SimError> {
    if shots == 0 || shots > MAX_SHOTS {
        return Err(SimError::InvalidShots(shots));
    }
    if circuit.measured.is_empty() {
        return Err(SimError::NoMeasuredQubits);
    }
    let state = run_statevector_mode(circuit, mode)?;
    let measured = circuit.measured_sorted();
    let probs = marginal_probabilities(&state, circuit.num_qubits, &measured);

    // CDF in ascending outcome order; summation order is part of the
    // determinism contract.
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0f64;
    let mut last_nonzero = 0usize;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        cdf.push(acc);
        if p > 0.0 {
            last_nonzero = k;
        }
    }

    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let draws: Vec<f64> = (0..shots).map(|_| rng.next_f64()).collect();
    let outcomes = map_outcomes(&draws, &cdf, last_nonzero, mode);

    let mut by_outcome: BTreeMap<usize, u64> = BTreeMap::new();
    for outcome in outcomes {
        *by_outcome.entry(outcome).or_insert(0) += 1;
    }
    let width = measured.len();
    let counts = by_outcome
        .into_iter()
        .map(|(outcome, n)| (render_bitstring(outcome, width), n))
        .collect();

    Ok(ExecutionResult {
        counts,
        shots,
        seed,
        backend: LOCAL_BACKEND_ID.to_string(),
    })
}

/// |amplitude|² marginalized over unmeasured qubits. Outcome index bit `j`
/// holds the value of the j-th smallest measured qubit.
fn marginal_probabilities(state: &[Complex64], num_qubits: usize, measured: &[usize]) -> Vec<f64> {
    let all_measured = measured.len() == num_qubits;
    if all_measured {
        return state.iter().map(|a| a.norm_sqr()).collect();
    }
    let mut probs = vec![0.0f64; 1 << measured.len()];
    for (i, amp) in state.iter().enumerate() {
        let mut outcome = 0usize;
        for (j, &q) in measured.iter().enumerate() {
            outcome |= ((i >> q) & 1) << j;
        }
        probs[outcome] += amp.norm_sqr();
    }
    probs
}

/// First CDF entry strictly above the draw; draws past the accumulated total
/// (floating-point underrun) resolve to the highest nonzero-probability
/// outcome.
fn outcome_for(x: f64, cdf: &[f64], last_nonzero: usize) -> usize {
    let idx = cdf.partition_point(|&c| c <= x);
    if idx >= cdf.len() {
        last_nonzero
    } else {
        idx
    }
}

#[cfg(feature = "parallel")]
fn map_outcomes(draws: &[f64], cdf: &[f64], last_nonzero: usize, mode: ExecMode) -> Vec<usize> {
    if mode == ExecMode::Parallel && draws.len() >= 1 << 14 {
        draws
            .par_iter()
            .map(|&x| outcome_for(x, cdf, last_nonzero))
            .collect()
    } else {
        draws
            .iter()
            .map(|&x| outcome_for(x, cdf, last_nonzero))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn map_outcomes(draws: &[f64], cdf: &[f64], last_nonzero: usize, _mode: ExecMode) -> Vec<usize> {
    draws
        .iter()
        .map(|&x| outcome_for(x, cdf, last_nonzero))
        .collect()
}

fn render_bitstring(outcome: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|j| if (outcome >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn gate_matrix(kind: GateKind) -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match kind {
        GateKind::H => [[inv_sqrt2, inv_sqrt2], [inv_sqrt2, -inv_sqrt2]],
        GateKind::X => [[zero, one], [one, zero]],
        GateKind::Y => [[zero, -i], [i, zero]],
        GateKind::Z => [[one, zero], [zero, -one]],
        GateKind::S => [[one, zero], [zero, i]],
        GateKind::T => [
            [one, zero],
            [
                zero,
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ],
        ],
        GateKind::Swap => unreachable!("swap has no 2x2 matrix"),
    }
}

fn control_masks(op: &GateOp) -> (usize, usize) {
    let pos = op.pos_controls.iter().fold(0usize, |m, &c| m | (1 << c));
    let neg = op.neg_controls.iter().fold(0usize, |m, &c| m | (1 << c));
    (pos, neg)
}

#[inline]
fn controls_satisfied(index: usize, pos_mask: usize, neg_mask: usize) -> bool {
    (index & pos_mask) == pos_mask && (index & neg_mask) == 0
}

fn apply_op(state: &mut [Complex64], op: &GateOp, mode: ExecMode) {
    let (pos, neg) = control_masks(op);
    match op.kind {
        GateKind::Swap => apply_swap(state, op.targets[0], op.targets[1], pos, neg, mode),
        kind => apply_single(state, gate_matrix(kind), op.targets[0], pos, neg, mode),
    }
}

/// Applies a 2×2 matrix to the target qubit. Amplitude pairs `(i, i|2^t)`
/// fall inside one block of length `2^(t+1)`, so blocks are independent.
fn apply_single(
    state: &mut [Complex64],
    m: [[Complex64; 2]; 2],
    target: usize,
    pos: usize,
    neg: usize,
    mode: ExecMode,
) {
    let half = 1usize << target;
    let block = half << 1;
    let kernel = move |block_index: usize, chunk: &mut [Complex64]| {
        let base = block_index * block;
        for lo in 0..half {
            let full_index = base | lo;
            if !controls_satisfied(full_index, pos, neg) {
                continue;
            }
            let a = chunk[lo];
            let b = chunk[lo + half];
            chunk[lo] = m[0][0] * a + m[0][1] * b;
            chunk[lo + half] = m[1][0] * a + m[1][1] * b;
        }
    };
    for_each_block(state, block, mode, kernel);
}

/// Swaps amplitudes between index pairs differing in both target bits. The
/// canonical element of each pair has the high target bit 0 and the low
/// target bit 1; its partner lives in the same `2^(hi+1)` block.
fn apply_swap(
    state: &mut [Complex64],
    t1: usize,
    t2: usize,
    pos: usize,
    neg: usize,
    mode: ExecMode,
) {
    let (lo_bit, hi_bit) = (t1.min(t2), t1.max(t2));
    let lo_mask = 1usize << lo_bit;
    let hi_mask = 1usize << hi_bit;
    let block = hi_mask << 1;
    let kernel = move |block_index: usize, chunk: &mut [Complex64]| {
        let base = block_index * block;
        for offset in 0..hi_mask {
            if offset & lo_mask == 0 {
                continue;
            }
            let full_index = base | offset;
            if !controls_satisfied(full_index, pos, neg) {
                continue;
            }
            chunk.swap(offset, (offset ^ lo_mask) | hi_mask);
        }
    };
    for_each_block(state, block, mode, kernel);
}

#[cfg(feature = "parallel")]
fn for_each_block(
    state: &mut [Complex64],
    block: usize,
    mode: ExecMode,
    kernel: impl Fn(usize, &mut [Complex64]) + Send + Sync,
) {
    if mode == ExecMode::Parallel && state.len() >= PARALLEL_THRESHOLD && block < state.len() {
        // Work is handed out as contiguous runs of whole blocks; per-block
        // tasks would be far too fine for low-target-bit gates (block = 2).
        let threads = rayon::current_num_threads().max(1);
        let blocks_total = state.len() / block;
        let blocks_per_task = (blocks_total / (threads * 4)).max(1);
        let task_len = blocks_per_task * block;
        state
            .par_chunks_mut(task_len)
            .enumerate()
            .for_each(|(task_index, task)| {
                let first_block = task_index * blocks_per_task;
                for (i, chunk) in task.chunks_mut(block).enumerate() {
                    kernel(first_block + i, chunk);
                }
            });
    } else {
        for (block_index, chunk) in state.chunks_mut(block).enumerate() {
            kernel(block_index, chunk);
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn for_each_block(
    state: &mut [Complex64],
    block: usize,
    _mode: ExecMode,
    kernel: impl Fn(usize, &mut [Complex64]) + Send + Sync,
) {
    for (block_index, chunk) in state.chunks_mut(block).enumerate() {
        kernel(block_index, chunk);
    }
}
