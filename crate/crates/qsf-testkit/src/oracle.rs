//! Brute-force dense-matrix simulation oracle.
//!
//! Builds the full 2^n × 2^n unitary of every operation from explicit
//! per-wire tensor factors and multiplies it through the state column.
//! Deliberately naive and structurally unrelated to the production kernels
//! (which update amplitude pairs in place): agreement between the two is the
//! correctness evidence for both.

use num_complex::Complex64;
use qsf_core::circuit::{CircuitIR, GateKind, GateOp};

type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn base_matrix(kind: GateKind) -> Matrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        GateKind::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        GateKind::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        GateKind::T => [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [
                c(0.0, 0.0),
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ],
        ],
        GateKind::Swap => unreachable!("oracle decomposes swap into three CX"),
    }
}

const IDENTITY: Matrix2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];
const PROJ0: Matrix2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
];
const PROJ1: Matrix2 = [
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

/// Entry (i, j) of a tensor product of per-wire 2×2 factors is the product
/// of the factors' entries selected by the corresponding bits of i and j.
fn tensor_entry(factors: &[Matrix2], i: usize, j: usize) -> Complex64 {
    let mut acc = c(1.0, 0.0);
    for (wire, m) in factors.iter().enumerate() {
        let bi = (i >> wire) & 1;
        let bj = (j >> wire) & 1;
        acc *= m[bi][bj];
        if acc == c(0.0, 0.0) {
            return acc;
        }
    }
    acc
}

/// Full unitary for a single-target gate with controls, as a sum over all
/// control-bit patterns: the satisfying pattern applies the gate on the
/// target wire, every other pattern applies identity.
fn controlled_unitary(
    num_qubits: usize,
    gate: Matrix2,
    target: usize,
    pos: &[usize],
    neg: &[usize],
) -> Vec<Vec<Complex64>> {
    let dim = 1usize << num_qubits;
    let controls: Vec<usize> = pos.iter().chain(neg.iter()).copied().collect();
    let mut matrix = vec![vec![c(0.0, 0.0); dim]; dim];
    for pattern in 0..(1usize << controls.len()) {
        let satisfied = controls.iter().enumerate().all(|(k, ctrl)| {
            let bit = (pattern >> k) & 1;
            if pos.contains(ctrl) {
                bit == 1
            } else {
                bit == 0
            }
        });
        let mut factors = vec![IDENTITY; num_qubits];
        for (k, &ctrl) in controls.iter().enumerate() {
            factors[ctrl] = if (pattern >> k) & 1 == 1 {
                PROJ1
            } else {
                PROJ0
            };
        }
        factors[target] = if satisfied { gate } else { IDENTITY };
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry += tensor_entry(&factors, i, j);
            }
        }
    }
    matrix
}

fn matvec(matrix: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    matrix
        .iter()
        .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
        .collect()
}

fn apply(state: Vec<Complex64>, num_qubits: usize, op: &GateOp) -> Vec<Complex64> {
    let pos: Vec<usize> = op.pos_controls.iter().copied().collect();
    let neg: Vec<usize> = op.neg_controls.iter().copied().collect();
    match op.kind {
        GateKind::Swap => {
            // Fredkin-style decomposition: SWAP(a, b) = CX(a→b) CX(b→a)
            // CX(a→b), each X inheriting the swap's own controls.
            let (a, b) = (op.targets[0], op.targets[1]);
            let mut state = state;
            for (ctrl, tgt) in [(a, b), (b, a), (a, b)] {
                let mut pos_all = pos.clone();
                pos_all.push(ctrl);
                let u =
                    controlled_unitary(num_qubits, base_matrix(GateKind::X), tgt, &pos_all, &neg);
                state = matvec(&u, &state);
            }
            state
        }
        kind => {
            let u = controlled_unitary(num_qubits, base_matrix(kind), op.targets[0], &pos, &neg);
            matvec(&u, &state)
        }
    }
}

/// Runs the circuit from |0…0⟩ through full-matrix multiplication.
pub fn run_dense(circuit: &CircuitIR) -> Vec<Complex64> {
    let dim = 1usize << circuit.num_qubits;
    let mut state = vec![c(0.0, 0.0); dim];
    state[0] = c(1.0, 0.0);
    for op in &circuit.ops {
        state = apply(state, circuit.num_qubits, op);
    }
    state
}

/// Largest elementwise distance between two state vectors.
pub fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
