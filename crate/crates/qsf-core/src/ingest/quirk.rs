//! Quirk share-URL decoding and lowering.
//!
//! Quirk serializes a circuit into the URL fragment as
//! `#circuit={"cols":[[...],[...]]}` — a column-major grid where the row
//! index is the wire (qubit) index. Untouched cells are the JSON number `1`.
//! Captured fixture URLs live under `fixtures/quirk/` so nothing here
//! depends on the live site.

use std::collections::BTreeSet;

use percent_encoding::percent_decode_str;

use super::IngestError;
use crate::circuit::{CircuitIR, GateKind, GateOp};

/// Tokens accepted in a grid cell. Anything else is an unsupported gate.
const CONTROL_POS: &str = "•";
const CONTROL_NEG: &str = "◦";
const SWAP: &str = "Swap";
const MEASURE: &str = "Measure";
const IDENTITY: &str = "1";

/// A decoded Quirk grid. Cells hold the raw tokens; validity of each token
/// is the lowering step's concern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuirkDocument {
    pub cols: Vec<Vec<String>>,
}

/// Decodes the `#circuit=` fragment of a Quirk share URL into the grid.
/// The fragment may be raw JSON or percent-encoded.
pub fn parse_quirk_url(url: &str) -> Result<QuirkDocument, IngestError> {
    let (_, fragment) = url.split_once("#circuit=").ok_or(IngestError::NoFragment)?;
    let decoded = percent_decode_str(fragment)
        .decode_utf8()
        .map_err(|e| IngestError::BadJson(e.to_string()))?;
    let value: serde_json::Value =
        serde_json::from_str(&decoded).map_err(|e| IngestError::BadJson(e.to_string()))?;

    let obj = value
        .as_object()
        .ok_or_else(|| IngestError::BadShape("top level is not an object".into()))?;
    for key in obj.keys() {
        if key != "cols" {
            return Err(IngestError::BadShape(format!(
                "unsupported top-level key {key:?}"
            )));
        }
    }
    let cols_value = obj
        .get("cols")
        .ok_or_else(|| IngestError::BadShape("missing 'cols'".into()))?;
    let cols_list = cols_value
        .as_array()
        .ok_or_else(|| IngestError::BadShape("'cols' is not a list".into()))?;

    let mut cols = Vec::with_capacity(cols_list.len());
    for (c, col) in cols_list.iter().enumerate() {
        let cells = col
            .as_array()
            .ok_or_else(|| IngestError::BadShape(format!("column {c} is not a list")))?;
        let mut tokens = Vec::with_capacity(cells.len());
        for (r, cell) in cells.iter().enumerate() {
            match cell {
                serde_json::Value::String(s) => tokens.push(s.clone()),
                // The Quirk app writes untouched wires as the number 1.
                serde_json::Value::Number(n) if n.as_u64() == Some(1) => {
                    tokens.push(IDENTITY.to_string())
                }
                other => {
                    return Err(IngestError::BadShape(format!(
                        "cell at column {c}, row {r} is not a gate token: {other}"
                    )))
                }
            }
        }
        cols.push(tokens);
    }
    Ok(QuirkDocument { cols })
}

/// Test-support serializer: renders a grid back into a share URL, writing
/// identity cells the way the Quirk app does. `parse_quirk_url` of the
/// result reproduces the document exactly.
pub fn render_quirk_url(doc: &QuirkDocument) -> String {
    let cols: Vec<Vec<serde_json::Value>> = doc
        .cols
        .iter()
        .map(|col| {
            col.iter()
                .map(|cell| {
                    if cell == IDENTITY {
                        serde_json::Value::from(1u64)
                    } else {
                        serde_json::Value::from(cell.as_str())
                    }
                })
                .collect()
        })
        .collect();
    let json = serde_json::json!({ "cols": cols });
    format!("https://algassert.com/quirk#circuit={json}")
}

fn gate_for_token(token: &str) -> Option<GateKind> {
    match token {
        "H" => Some(GateKind::H),
        "X" => Some(GateKind::X),
        "Y" => Some(GateKind::Y),
        "Z" => Some(GateKind::Z),
        "S" => Some(GateKind::S),
        "T" => Some(GateKind::T),
        _ => None,
    }
}

/// Lowers a grid to IR, column by column.
///
/// Within a column every non-control gate becomes one operation carrying the
/// column's full control set; a Swap pair becomes a single swap operation;
/// `Measure` marks its qubit measured from that column on. Operations on an
/// already-measured qubit are rejected.
pub fn lower_quirk(doc: &QuirkDocument) -> Result<CircuitIR, IngestError> {
    // Trailing identity rows still count as wires: ["1","H"] is two qubits.
    let num_qubits = doc.cols.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let mut ops = Vec::new();
    let mut measured: BTreeSet<usize> = BTreeSet::new();

    for (c, col) in doc.cols.iter().enumerate() {
        let mut pos_controls: BTreeSet<usize> = BTreeSet::new();
        let mut neg_controls: BTreeSet<usize> = BTreeSet::new();
        let mut gates: Vec<(usize, GateKind)> = Vec::new();
        let mut swap_rows: Vec<usize> = Vec::new();
        let mut measure_rows: Vec<usize> = Vec::new();

        for (r, token) in col.iter().enumerate() {
            match token.as_str() {
                IDENTITY => {}
                CONTROL_POS => {
                    pos_controls.insert(r);
                }
                CONTROL_NEG => {
                    neg_controls.insert(r);
                }
                SWAP => swap_rows.push(r),
                MEASURE => measure_rows.push(r),
                other => match gate_for_token(other) {
                    Some(kind) => gates.push((r, kind)),
                    None => {
                        return Err(IngestError::UnsupportedGate {
                            token: other.to_string(),
                            column: c,
                            row: r,
                        })
                    }
                },
            }
        }

        if swap_rows.len() == 1 || swap_rows.len() > 2 {
            return Err(IngestError::LonelySwap { column: c });
        }
        let has_controls = !pos_controls.is_empty() || !neg_controls.is_empty();
        if has_controls && gates.is_empty() && swap_rows.is_empty() {
            return Err(IngestError::ControlOnlyColumn { column: c });
        }
        // Controls touch their qubit just like targets do; measured wires
        // are off limits either way (no mid-circuit measurement semantics).
        if let Some(&qubit) = pos_controls
            .iter()
            .chain(neg_controls.iter())
            .find(|q| measured.contains(q))
        {
            return Err(IngestError::OpAfterMeasure { qubit });
        }

        for &(row, kind) in &gates {
            if measured.contains(&row) {
                return Err(IngestError::OpAfterMeasure { qubit: row });
            }
            ops.push(GateOp {
                kind,
                targets: vec![row],
                pos_controls: pos_controls.clone(),
                neg_controls: neg_controls.clone(),
            });
        }
        if let [a, b] = swap_rows[..] {
            if measured.contains(&a) || measured.contains(&b) {
                let qubit = if measured.contains(&a) { a } else { b };
                return Err(IngestError::OpAfterMeasure { qubit });
            }
            let mut op = GateOp::swap(a, b);
            op.pos_controls = pos_controls.clone();
            op.neg_controls = neg_controls.clone();
            ops.push(op);
        }
        for &row in &measure_rows {
            if !measured.insert(row) {
                return Err(IngestError::OpAfterMeasure { qubit: row });
            }
        }
    }

    Ok(CircuitIR {
        num_qubits,
        ops,
        measured,
    })
}

/// Decode-and-lower in one step.
pub fn quirk_circuit(url: &str) -> Result<CircuitIR, IngestError> {
    lower_quirk(&parse_quirk_url(url)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL_URL: &str = r#"https://algassert.com/quirk#circuit={"cols":[["H"],["•","X"]]}"#;

    #[test]
    fn decodes_raw_fragment() {
        let doc = parse_quirk_url(BELL_URL).unwrap();
        assert_eq!(
            doc.cols,
            vec![
                vec!["H".to_string()],
                vec!["•".to_string(), "X".to_string()]
            ]
        );
    }

    #[test]
    fn decodes_percent_encoded_fragment() {
        let url = "https://algassert.com/quirk#circuit=%7B%22cols%22%3A%5B%5B%22H%22%5D%5D%7D";
        let doc = parse_quirk_url(url).unwrap();
        assert_eq!(doc.cols, vec![vec!["H".to_string()]]);
    }

    #[test]
    fn accepts_numeric_identity_cells() {
        let url = r#"x#circuit={"cols":[[1,"H"]]}"#;
        let doc = parse_quirk_url(url).unwrap();
        assert_eq!(doc.cols, vec![vec!["1".to_string(), "H".to_string()]]);
    }

    #[test]
    fn empty_cols_is_a_valid_document() {
        let doc = parse_quirk_url(r#"x#circuit={"cols":[]}"#).unwrap();
        assert!(doc.cols.is_empty());
        // An empty grid still describes a single idle wire.
        let circuit = lower_quirk(&doc).unwrap();
        assert_eq!(circuit.num_qubits, 1);
        assert!(circuit.ops.is_empty());
    }

    #[test]
    fn missing_fragment_is_rejected() {
        assert_eq!(
            parse_quirk_url("https://algassert.com/quirk"),
            Err(IngestError::NoFragment)
        );
    }

    #[test]
    fn bad_json_is_rejected() {
        assert!(matches!(
            parse_quirk_url("x#circuit={nope"),
            Err(IngestError::BadJson(_))
        ));
    }

    #[test]
    fn bad_shapes_are_rejected() {
        assert!(matches!(
            parse_quirk_url(r#"x#circuit=[1]"#),
            Err(IngestError::BadShape(_))
        ));
        assert!(matches!(
            parse_quirk_url(r#"x#circuit={"rows":[]}"#),
            Err(IngestError::BadShape(_))
        ));
        assert!(matches!(
            parse_quirk_url(r#"x#circuit={"cols":[[2]]}"#),
            Err(IngestError::BadShape(_))
        ));
        assert!(matches!(
            parse_quirk_url(r#"x#circuit={"cols":[],"init":[1]}"#),
            Err(IngestError::BadShape(_))
        ));
    }

    #[test]
    fn lowers_bell_grid() {
        let circuit = quirk_circuit(BELL_URL).unwrap();
        assert_eq!(circuit.num_qubits, 2);
        assert_eq!(
            circuit.ops,
            vec![
                GateOp::single(GateKind::H, 0),
                GateOp::controlled(GateKind::X, 1, [0])
            ]
        );
        assert!(circuit.measured.is_empty());
    }

    #[test]
    fn measure_column_marks_qubits() {
        let url = r#"x#circuit={"cols":[["H"],["•","X"],["Measure","Measure"]]}"#;
        let circuit = quirk_circuit(url).unwrap();
        assert_eq!(circuit.measured_sorted(), vec![0, 1]);
        assert_eq!(circuit.ops.len(), 2);
    }

    #[test]
    fn trailing_identity_row_extends_qubit_count() {
        let circuit = quirk_circuit(r#"x#circuit={"cols":[["1","H"]]}"#).unwrap();
        assert_eq!(circuit.num_qubits, 2);
        assert_eq!(circuit.ops, vec![GateOp::single(GateKind::H, 1)]);
    }

    #[test]
    fn control_only_column_is_rejected() {
        assert_eq!(
            quirk_circuit(r#"x#circuit={"cols":[["•"]]}"#),
            Err(IngestError::ControlOnlyColumn { column: 0 })
        );
    }

    #[test]
    fn lonely_swap_is_rejected() {
        assert_eq!(
            quirk_circuit(r#"x#circuit={"cols":[["Swap"]]}"#),
            Err(IngestError::LonelySwap { column: 0 })
        );
        assert_eq!(
            quirk_circuit(r#"x#circuit={"cols":[["Swap","Swap","Swap"]]}"#),
            Err(IngestError::LonelySwap { column: 0 })
        );
    }

    #[test]
    fn controlled_swap_keeps_controls() {
        let circuit = quirk_circuit(r#"x#circuit={"cols":[["•","Swap","Swap"]]}"#).unwrap();
        assert_eq!(circuit.ops.len(), 1);
        assert_eq!(circuit.ops[0].kind, GateKind::Swap);
        assert_eq!(circuit.ops[0].targets, vec![1, 2]);
        assert!(circuit.ops[0].pos_controls.contains(&0));
    }

    #[test]
    fn gate_after_measure_is_rejected() {
        let url = r#"x#circuit={"cols":[["Measure"],["X"]]}"#;
        assert_eq!(
            quirk_circuit(url),
            Err(IngestError::OpAfterMeasure { qubit: 0 })
        );
        let remeasure = r#"x#circuit={"cols":[["Measure"],["Measure"]]}"#;
        assert_eq!(
            quirk_circuit(remeasure),
            Err(IngestError::OpAfterMeasure { qubit: 0 })
        );
        // Controls count as touching the wire too.
        let control_after = r#"x#circuit={"cols":[["Measure"],["•","X"]]}"#;
        assert_eq!(
            quirk_circuit(control_after),
            Err(IngestError::OpAfterMeasure { qubit: 0 })
        );
    }

    #[test]
    fn unsupported_tokens_are_named() {
        assert_eq!(
            quirk_circuit(r#"x#circuit={"cols":[["X^t"]]}"#),
            Err(IngestError::UnsupportedGate {
                token: "X^t".into(),
                column: 0,
                row: 0
            })
        );
    }

    #[test]
    fn negative_controls_lower() {
        let circuit = quirk_circuit(r#"x#circuit={"cols":[["◦","X"]]}"#).unwrap();
        assert_eq!(
            circuit.ops[0]
                .neg_controls
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![0]
        );
    }

    #[test]
    fn render_then_parse_is_identity() {
        let doc = QuirkDocument {
            cols: vec![
                vec!["H".into()],
                vec!["•".into(), "X".into()],
                vec!["1".into(), "Measure".into()],
            ],
        };
        let url = render_quirk_url(&doc);
        assert!(
            url.contains(",1,") || url.contains("[1,") || url.contains(",1]"),
            "{url}"
        );
        assert_eq!(parse_quirk_url(&url).unwrap(), doc);
    }
}
