//! Line-oriented expected-IR fixture format (`fixtures/ir/*.ir`).
//!
//! See `docs/fixture-format.md`. Shape:
//!
//! ```text
//! # free comment
//! qubits 3
//! measured 0 1 2
//! H 0
//! X 1 c:0
//! X 2 c:0,1
//! SWAP 0 1 n:2
//! ```
//!
//! `measured -` denotes the empty set. Controls: `c:` positive, `n:`
//! negative, comma-separated qubit indices.

use qsf_core::circuit::{CircuitIR, GateKind, GateOp};

pub fn parse_ir_text(text: &str) -> Result<CircuitIR, String> {
    let mut num_qubits: Option<usize> = None;
    let mut measured: Option<Vec<usize>> = None;
    let mut ops = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().expect("non-empty line");
        match head {
            "qubits" => {
                let n = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| format!("line {}: bad qubits line", lineno + 1))?;
                num_qubits = Some(n);
            }
            "measured" => {
                let mut set = Vec::new();
                for tok in parts {
                    if tok == "-" {
                        continue;
                    }
                    set.push(
                        tok.parse().map_err(|_| {
                            format!("line {}: bad measured index {tok}", lineno + 1)
                        })?,
                    );
                }
                measured = Some(set);
            }
            gate => {
                let kind = match gate {
                    "H" => GateKind::H,
                    "X" => GateKind::X,
                    "Y" => GateKind::Y,
                    "Z" => GateKind::Z,
                    "S" => GateKind::S,
                    "T" => GateKind::T,
                    "SWAP" => GateKind::Swap,
                    other => return Err(format!("line {}: unknown gate {other}", lineno + 1)),
                };
                let mut targets = Vec::new();
                let mut pos = Vec::new();
                let mut neg = Vec::new();
                for tok in parts {
                    if let Some(list) = tok.strip_prefix("c:") {
                        for c in list.split(',') {
                            pos.push(
                                c.parse()
                                    .map_err(|_| format!("line {}: bad control {c}", lineno + 1))?,
                            );
                        }
                    } else if let Some(list) = tok.strip_prefix("n:") {
                        for c in list.split(',') {
                            neg.push(c.parse().map_err(|_| {
                                format!("line {}: bad neg control {c}", lineno + 1)
                            })?);
                        }
                    } else {
                        targets.push(
                            tok.parse()
                                .map_err(|_| format!("line {}: bad target {tok}", lineno + 1))?,
                        );
                    }
                }
                let mut op = match (kind, targets.as_slice()) {
                    (GateKind::Swap, [a, b]) => GateOp::swap(*a, *b),
                    (k, [t]) => GateOp::single(k, *t),
                    _ => return Err(format!("line {}: bad target count", lineno + 1)),
                };
                op.pos_controls = pos.into_iter().collect();
                op.neg_controls = neg.into_iter().collect();
                ops.push(op);
            }
        }
    }

    let num_qubits = num_qubits.ok_or("missing 'qubits' line")?;
    let measured = measured.ok_or("missing 'measured' line")?;
    Ok(CircuitIR {
        num_qubits,
        ops,
        measured: measured.into_iter().collect(),
    })
}

pub fn render_ir_text(circuit: &CircuitIR) -> String {
    let mut out = format!("qubits {}\n", circuit.num_qubits);
    if circuit.measured.is_empty() {
        out.push_str("measured -\n");
    } else {
        let list: Vec<String> = circuit.measured.iter().map(usize::to_string).collect();
        out.push_str(&format!("measured {}\n", list.join(" ")));
    }
    for op in &circuit.ops {
        let targets: Vec<String> = op.targets.iter().map(usize::to_string).collect();
        out.push_str(&format!("{} {}", op.kind.name(), targets.join(" ")));
        if !op.pos_controls.is_empty() {
            let c: Vec<String> = op.pos_controls.iter().map(usize::to_string).collect();
            out.push_str(&format!(" c:{}", c.join(",")));
        }
        if !op.neg_controls.is_empty() {
            let n: Vec<String> = op.neg_controls.iter().map(usize::to_string).collect();
            out.push_str(&format!(" n:{}", n.join(",")));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_the_bell_fixture_shape() {
        let text = "# bell\nqubits 2\nmeasured 0 1\nH 0\nX 1 c:0\n";
        let circuit = parse_ir_text(text).unwrap();
        assert_eq!(circuit.num_qubits, 2);
        assert_eq!(circuit.ops.len(), 2);
        let rendered = render_ir_text(&circuit);
        assert_eq!(parse_ir_text(&rendered).unwrap(), circuit);
    }

    #[test]
    fn empty_measured_uses_dash() {
        let circuit = CircuitIR::new(1);
        let rendered = render_ir_text(&circuit);
        assert!(rendered.contains("measured -"));
        assert_eq!(parse_ir_text(&rendered).unwrap(), circuit);
    }
}
