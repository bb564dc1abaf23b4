//! OpenQASM 2.0 subset parser.
//!
//! The accepted subset is what the code-URL ingestion path and the emitter
//! exchange: the `OPENQASM 2.0` header, an optional `include "qelib1.inc"`,
//! one quantum register, one optional classical register, the gates
//! `h x y z s t cx ccx swap`, and `measure` (indexed or whole-register).
//! Everything else in the language is reported as unsupported with its line.

use std::collections::BTreeSet;

use super::IngestError;
use crate::circuit::{CircuitIR, GateKind, GateOp};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(String),
    Str(String),
    LBracket,
    RBracket,
    LParen,
    LBrace,
    Comma,
    Semicolon,
    Arrow,
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
}

fn syntax(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::QasmSyntax {
        line,
        message: message.into(),
    }
}

fn unsupported(line: usize, construct: impl Into<String>) -> IngestError {
    IngestError::QasmUnsupported {
        construct: construct.into(),
        line,
    }
}

fn index_err(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::QasmIndex {
        line,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, IngestError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '/' => {
                chars.next();
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        chars.next();
                    }
                } else {
                    return Err(syntax(line, "unexpected '/'"));
                }
            }
            '[' => {
                tokens.push(Spanned {
                    token: Token::LBracket,
                    line,
                });
                chars.next();
            }
            ']' => {
                tokens.push(Spanned {
                    token: Token::RBracket,
                    line,
                });
                chars.next();
            }
            '(' => {
                tokens.push(Spanned {
                    token: Token::LParen,
                    line,
                });
                chars.next();
            }
            ')' | '}' => {
                // Parameter lists and gate bodies are rejected at parse
                // level; the opening token is enough to diagnose, so the
                // closers never matter.
                chars.next();
            }
            '{' => {
                tokens.push(Spanned {
                    token: Token::LBrace,
                    line,
                });
                chars.next();
            }
            ',' => {
                tokens.push(Spanned {
                    token: Token::Comma,
                    line,
                });
                chars.next();
            }
            ';' => {
                tokens.push(Spanned {
                    token: Token::Semicolon,
                    line,
                });
                chars.next();
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    tokens.push(Spanned {
                        token: Token::Arrow,
                        line,
                    });
                } else {
                    return Err(syntax(line, "expected '->'"));
                }
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\n') | None => return Err(syntax(line, "unterminated string")),
                        Some(c) => s.push(c),
                    }
                }
                tokens.push(Spanned {
                    token: Token::Str(s),
                    line,
                });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Spanned {
                    token: Token::Number(s),
                    line,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Spanned {
                    token: Token::Ident(s),
                    line,
                });
            }
            other => return Err(syntax(line, format!("unexpected character {other:?}"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_semicolon(&mut self) -> Result<(), IngestError> {
        match self.next() {
            Some(Spanned {
                token: Token::Semicolon,
                ..
            }) => Ok(()),
            Some(t) => Err(syntax(t.line, "expected ';'")),
            None => Err(syntax(
                self.last_line,
                "unexpected end of input, expected ';'",
            )),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize), IngestError> {
        match self.next() {
            Some(Spanned {
                token: Token::Ident(s),
                line,
            }) => Ok((s, line)),
            Some(t) => Err(syntax(t.line, "expected an identifier")),
            None => Err(syntax(self.last_line, "unexpected end of input")),
        }
    }

    fn expect_index(&mut self) -> Result<(usize, usize), IngestError> {
        match self.next() {
            Some(Spanned {
                token: Token::LBracket,
                ..
            }) => {}
            Some(t) => return Err(syntax(t.line, "expected '['")),
            None => return Err(syntax(self.last_line, "unexpected end of input")),
        }
        let (value, line) = match self.next() {
            Some(Spanned {
                token: Token::Number(n),
                line,
            }) => {
                let v = n
                    .parse::<usize>()
                    .map_err(|_| syntax(line, format!("invalid register index {n:?}")))?;
                (v, line)
            }
            Some(t) => return Err(syntax(t.line, "expected a register index")),
            None => return Err(syntax(self.last_line, "unexpected end of input")),
        };
        match self.next() {
            Some(Spanned {
                token: Token::RBracket,
                ..
            }) => Ok((value, line)),
            Some(t) => Err(syntax(t.line, "expected ']'")),
            None => Err(syntax(self.last_line, "unexpected end of input")),
        }
    }
}

struct Register {
    name: String,
    size: usize,
}

/// Parses the supported OpenQASM 2.0 subset into IR.
pub fn parse_qasm(text: &str) -> Result<CircuitIR, IngestError> {
    let tokens = lex(text)?;
    let last_line = tokens.last().map(|t| t.line).unwrap_or(1);
    let mut p = Parser {
        tokens,
        pos: 0,
        last_line,
    };

    // Header: OPENQASM 2.0 ;
    let (head, head_line) = p
        .expect_ident()
        .map_err(|_| syntax(1, "missing OPENQASM header"))?;
    if head != "OPENQASM" {
        return Err(syntax(head_line, "program must start with 'OPENQASM 2.0;'"));
    }
    match p.next() {
        Some(Spanned {
            token: Token::Number(v),
            line,
        }) => {
            if v != "2.0" {
                return Err(unsupported(line, format!("OPENQASM {v}")));
            }
        }
        _ => return Err(syntax(head_line, "expected a version after OPENQASM")),
    }
    p.expect_semicolon()?;

    let mut qreg: Option<Register> = None;
    let mut creg: Option<Register> = None;
    let mut ops: Vec<GateOp> = Vec::new();
    let mut measured: BTreeSet<usize> = BTreeSet::new();
    // (qubit, classical bit, line) for the post-parse mapping check.
    let mut measure_map: Vec<(usize, usize, usize)> = Vec::new();

    while let Some(spanned) = p.next() {
        let line = spanned.line;
        let ident = match spanned.token {
            Token::Ident(s) => s,
            other => return Err(syntax(line, format!("unexpected token {other:?}"))),
        };
        match ident.as_str() {
            "include" => {
                let name = match p.next() {
                    Some(Spanned {
                        token: Token::Str(s),
                        ..
                    }) => s,
                    _ => return Err(syntax(line, "expected a file name after include")),
                };
                if name != "qelib1.inc" {
                    return Err(unsupported(line, format!("include \"{name}\"")));
                }
                p.expect_semicolon()?;
            }
            "qreg" | "creg" => {
                let (name, _) = p.expect_ident()?;
                let (size, size_line) = p.expect_index()?;
                p.expect_semicolon()?;
                if size == 0 {
                    return Err(syntax(size_line, "register size must be at least 1"));
                }
                let slot = if ident == "qreg" {
                    &mut qreg
                } else {
                    &mut creg
                };
                if slot.is_some() {
                    return Err(unsupported(line, format!("multiple {ident} declarations")));
                }
                *slot = Some(Register { name, size });
            }
            "measure" => {
                let q = qreg
                    .as_ref()
                    .ok_or_else(|| syntax(line, "measure before qreg declaration"))?;
                let c = creg
                    .as_ref()
                    .ok_or_else(|| syntax(line, "measure requires a creg declaration"))?;
                let (qname, qline) = p.expect_ident()?;
                if qname != q.name {
                    return Err(index_err(qline, format!("unknown register {qname:?}")));
                }
                let q_index = match p.peek() {
                    Some(Spanned {
                        token: Token::LBracket,
                        ..
                    }) => Some(p.expect_index()?),
                    _ => None,
                };
                match p.next() {
                    Some(Spanned {
                        token: Token::Arrow,
                        ..
                    }) => {}
                    Some(t) => return Err(syntax(t.line, "expected '->'")),
                    None => return Err(syntax(p.last_line, "unexpected end of input")),
                }
                let (cname, cline) = p.expect_ident()?;
                if cname != c.name {
                    return Err(index_err(cline, format!("unknown register {cname:?}")));
                }
                let c_index = match p.peek() {
                    Some(Spanned {
                        token: Token::LBracket,
                        ..
                    }) => Some(p.expect_index()?),
                    _ => None,
                };
                p.expect_semicolon()?;

                match (q_index, c_index) {
                    (Some((qi, qil)), Some((ci, cil))) => {
                        if qi >= q.size {
                            return Err(index_err(
                                qil,
                                format!("q[{qi}] exceeds qreg size {}", q.size),
                            ));
                        }
                        if ci >= c.size {
                            return Err(index_err(
                                cil,
                                format!("c[{ci}] exceeds creg size {}", c.size),
                            ));
                        }
                        if !measured.insert(qi) {
                            return Err(IngestError::OpAfterMeasure { qubit: qi });
                        }
                        measure_map.push((qi, ci, line));
                    }
                    (None, None) => {
                        if c.size < q.size {
                            return Err(index_err(
                                line,
                                format!(
                                    "creg size {} is smaller than qreg size {}",
                                    c.size, q.size
                                ),
                            ));
                        }
                        for i in 0..q.size {
                            if !measured.insert(i) {
                                return Err(IngestError::OpAfterMeasure { qubit: i });
                            }
                            measure_map.push((i, i, line));
                        }
                    }
                    _ => return Err(syntax(line, "measure must index both registers or neither")),
                }
            }
            gate => {
                let kind = match gate {
                    "h" => Some((GateKind::H, 1, 0)),
                    "x" => Some((GateKind::X, 1, 0)),
                    "y" => Some((GateKind::Y, 1, 0)),
                    "z" => Some((GateKind::Z, 1, 0)),
                    "s" => Some((GateKind::S, 1, 0)),
                    "t" => Some((GateKind::T, 1, 0)),
                    "cx" => Some((GateKind::X, 2, 1)),
                    "ccx" => Some((GateKind::X, 3, 2)),
                    "swap" => Some((GateKind::Swap, 2, 0)),
                    _ => None,
                };
                // Anything outside the subset — u3, barrier, reset, gate
                // definitions, if, custom names — is an unsupported construct.
                let Some((kind, arity, n_controls)) = kind else {
                    return Err(unsupported(line, gate));
                };
                if matches!(
                    p.peek(),
                    Some(Spanned {
                        token: Token::LParen,
                        ..
                    })
                ) {
                    return Err(unsupported(line, format!("{gate} with parameters")));
                }
                let q = qreg
                    .as_ref()
                    .ok_or_else(|| syntax(line, "gate before qreg declaration"))?;
                let mut operands = Vec::with_capacity(arity);
                for k in 0..arity {
                    if k > 0 {
                        match p.next() {
                            Some(Spanned {
                                token: Token::Comma,
                                ..
                            }) => {}
                            Some(t) => return Err(syntax(t.line, "expected ','")),
                            None => return Err(syntax(p.last_line, "unexpected end of input")),
                        }
                    }
                    let (name, name_line) = p.expect_ident()?;
                    if name != q.name {
                        return Err(index_err(name_line, format!("unknown register {name:?}")));
                    }
                    if !matches!(
                        p.peek(),
                        Some(Spanned {
                            token: Token::LBracket,
                            ..
                        })
                    ) {
                        return Err(unsupported(
                            name_line,
                            format!("{gate} on a whole register"),
                        ));
                    }
                    let (idx, idx_line) = p.expect_index()?;
                    if idx >= q.size {
                        return Err(index_err(
                            idx_line,
                            format!("q[{idx}] exceeds qreg size {}", q.size),
                        ));
                    }
                    operands.push(idx);
                }
                p.expect_semicolon()?;

                let mut distinct = operands.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() != operands.len() {
                    return Err(syntax(line, "gate operands must be distinct qubits"));
                }
                for &qubit in &operands {
                    if measured.contains(&qubit) {
                        return Err(IngestError::OpAfterMeasure { qubit });
                    }
                }

                let (controls, targets) = operands.split_at(n_controls);
                let op = match kind {
                    GateKind::Swap => GateOp::swap(targets[0], targets[1]),
                    k => GateOp::controlled(k, targets[0], controls.iter().copied()),
                };
                ops.push(op);
            }
        }
    }

    let qreg = qreg.ok_or_else(|| syntax(last_line, "program declares no quantum register"))?;

    // Classical bits must follow qubit order; otherwise Qiskit's bitstring
    // convention and ours would disagree on the same program.
    let mut sorted = measure_map.clone();
    sorted.sort_by_key(|&(q, _, _)| q);
    for (rank, &(_, cbit, line)) in sorted.iter().enumerate() {
        if cbit != rank {
            return Err(unsupported(
                line,
                "measurement mapping that permutes classical bit order",
            ));
        }
    }

    let circuit = CircuitIR {
        num_qubits: qreg.size,
        ops,
        measured,
    };
    debug_assert!(circuit.validate().is_ok());
    Ok(circuit)
}
