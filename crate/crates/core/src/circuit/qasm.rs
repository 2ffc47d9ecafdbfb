//! Reader and writer for the OpenQASM 2.0 subset used throughout the crate.
//!
//! One register of each kind, the fixed gate set of [`Gate`], `measure`,
//! `reset` and `barrier`. Statements end with `;`, `//` starts a comment and
//! whitespace is insignificant.

use std::fmt::Write as _;

use super::{Circuit, CircuitError, Gate, GateSpecError, Instruction, QubitId};

struct Register {
    name: String,
    size: usize,
}

struct Statement {
    line: usize,
    text: String,
}

/// Splits the source into `;`-terminated statements, dropping comments and
/// remembering the line each statement starts on.
fn statements(src: &str) -> Result<Vec<Statement>, CircuitError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 0;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                out.push(Statement {
                    line: start_line,
                    text: current.trim().to_string(),
                });
                current.clear();
                continue;
            }
            if current.trim().is_empty() && !ch.is_whitespace() {
                start_line = lineno + 1;
            }
            current.push(ch);
        }
        current.push(' ');
    }
    if !current.trim().is_empty() {
        return Err(CircuitError::Syntax {
            line: start_line,
            message: "missing `;` at end of statement".to_string(),
        });
    }
    Ok(out)
}

fn syntax(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses `name[index]`.
fn indexed(line: usize, text: &str) -> Result<(String, usize), CircuitError> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (name, rest) = text
        .split_once('[')
        .ok_or_else(|| syntax(line, format!("expected `name[index]`, found `{text}`")))?;
    let index = rest
        .strip_suffix(']')
        .and_then(|i| i.parse::<usize>().ok())
        .ok_or_else(|| syntax(line, format!("malformed index in `{text}`")))?;
    if !is_identifier(name) {
        return Err(syntax(line, format!("invalid register name `{name}`")));
    }
    Ok((name.to_string(), index))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    qreg: Option<Register>,
    creg: Option<Register>,
    max_clbit: Option<usize>,
    implicit_creg: Option<String>,
    instructions: Vec<Instruction>,
}

impl Parser {
    fn declare(&mut self, line: usize, quantum: bool, rest: &str) -> Result<(), CircuitError> {
        let (name, size) = indexed(line, rest)?;
        let slot = if quantum { &mut self.qreg } else { &mut self.creg };
        if slot.is_some() {
            return Err(syntax(line, "only one register of each kind is supported"));
        }
        *slot = Some(Register { name, size });
        Ok(())
    }

    fn qubit(&self, line: usize, arg: &str) -> Result<QubitId, CircuitError> {
        let reg = self
            .qreg
            .as_ref()
            .ok_or_else(|| syntax(line, "qreg must be declared before use"))?;
        let (name, index) = indexed(line, arg)?;
        if name != reg.name {
            return Err(syntax(line, format!("unknown quantum register `{name}`")));
        }
        if index >= reg.size {
            return Err(CircuitError::QubitOutOfRange {
                line,
                index,
                size: reg.size,
            });
        }
        Ok(QubitId(index))
    }

    fn clbit(&mut self, line: usize, arg: &str) -> Result<usize, CircuitError> {
        let (name, index) = indexed(line, arg)?;
        match &self.creg {
            Some(reg) => {
                if name != reg.name {
                    return Err(syntax(line, format!("unknown classical register `{name}`")));
                }
                if index >= reg.size {
                    return Err(syntax(
                        line,
                        format!("classical bit {index} out of range for `{name}[{}]`", reg.size),
                    ));
                }
            }
            None => match &self.implicit_creg {
                Some(prev) if *prev != name => {
                    return Err(syntax(line, format!("unknown classical register `{name}`")))
                }
                _ => self.implicit_creg = Some(name),
            },
        }
        self.max_clbit = Some(self.max_clbit.map_or(index, |m| m.max(index)));
        Ok(index)
    }

    fn statement(&mut self, stmt: &Statement) -> Result<(), CircuitError> {
        let line = stmt.line;
        let text = stmt.text.as_str();
        if text.is_empty() {
            return Ok(());
        }
        let (head, rest) = match text.find(|c: char| c.is_whitespace() || c == '(') {
            Some(pos) => (&text[..pos], text[pos..].trim()),
            None => (text, ""),
        };
        match head {
            "OPENQASM" => {
                if !rest.starts_with('2') {
                    return Err(syntax(line, format!("unsupported OpenQASM version `{rest}`")));
                }
            }
            "include" => {}
            "qreg" => self.declare(line, true, rest)?,
            "creg" => self.declare(line, false, rest)?,
            "measure" => {
                let (q, c) = rest
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "expected `measure q[i] -> c[k]`"))?;
                let qubit = self.qubit(line, q)?;
                let clbit = self.clbit(line, c)?;
                self.instructions.push(Instruction::Measure { qubit, clbit });
            }
            "reset" => {
                let qubit = self.qubit(line, rest)?;
                self.instructions.push(Instruction::Reset { qubit });
            }
            "barrier" => {
                let mut qubits = Vec::new();
                let whole = self.qreg.as_ref().is_some_and(|r| r.name == rest);
                if !rest.is_empty() && !whole {
                    for arg in rest.split(',') {
                        qubits.push(self.qubit(line, arg)?);
                    }
                }
                self.instructions.push(Instruction::Barrier { qubits });
            }
            name => self.gate(line, name, rest)?,
        }
        Ok(())
    }

    fn gate(&mut self, line: usize, name: &str, rest: &str) -> Result<(), CircuitError> {
        if !is_identifier(name) {
            return Err(syntax(line, format!("unexpected `{name}`")));
        }
        let (params, args) = if let Some(inner) = rest.strip_prefix('(') {
            // split top-level commas up to the matching `)`
            let mut depth = 0usize;
            let mut close = None;
            let mut pieces = Vec::new();
            let mut start = 0;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' if depth == 0 => {
                        close = Some(i);
                        break;
                    }
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        pieces.push(&inner[start..i]);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            let close = close.ok_or_else(|| syntax(line, "unclosed parameter list"))?;
            pieces.push(&inner[start..close]);
            let params = pieces
                .into_iter()
                .filter(|p| !p.trim().is_empty())
                .map(|p| eval_angle(p).map_err(|m| syntax(line, m)))
                .collect::<Result<Vec<_>, _>>()?;
            (params, &inner[close + 1..])
        } else {
            (Vec::new(), rest)
        };
        let gate = Gate::from_name(name, &params).map_err(|e| match e {
            GateSpecError::Unknown(name) => CircuitError::UnknownGate { line, name },
            other => syntax(line, other.to_string()),
        })?;
        let qubits = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| self.qubit(line, a))
            .collect::<Result<Vec<_>, _>>()?;
        if qubits.len() != gate.arity() {
            return Err(syntax(
                line,
                format!(
                    "gate `{name}` takes {} qubit(s), found {}",
                    gate.arity(),
                    qubits.len()
                ),
            ));
        }
        if gate.arity() == 2 && qubits[0] == qubits[1] {
            return Err(syntax(line, format!("gate `{name}` needs two distinct qubits")));
        }
        self.instructions.push(Instruction::Gate { gate, qubits });
        Ok(())
    }
}

/// Parses circuit text into a [`Circuit`], preserving source order.
pub fn parse_circuit(src: &str) -> Result<Circuit, CircuitError> {
    let mut parser = Parser {
        qreg: None,
        creg: None,
        max_clbit: None,
        implicit_creg: None,
        instructions: Vec::new(),
    };
    for stmt in statements(src)? {
        parser.statement(&stmt)?;
    }
    let qreg = parser
        .qreg
        .ok_or_else(|| syntax(0, "missing `qreg` declaration"))?;
    let num_clbits = match parser.creg {
        Some(reg) => reg.size,
        None => parser.max_clbit.map_or(0, |m| m + 1),
    };
    Circuit::new(qreg.size, num_clbits, parser.instructions)
}

/// Emits the text form of `circuit`. `parse_circuit` reads it back to an
/// identical value.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits());
    let _ = writeln!(out, "creg c[{}];", circuit.num_clbits());
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate { gate, qubits } => {
                out.push_str(gate.name());
                if let Some(theta) = gate.params() {
                    let _ = write!(out, "({theta})");
                }
                for (i, q) in qubits.iter().enumerate() {
                    let sep = if i == 0 { ' ' } else { ',' };
                    let _ = write!(out, "{sep}q[{}]", q.0);
                }
                out.push_str(";\n");
            }
            Instruction::Measure { qubit, clbit } => {
                let _ = writeln!(out, "measure q[{}] -> c[{}];", qubit.0, clbit);
            }
            Instruction::Reset { qubit } => {
                let _ = writeln!(out, "reset q[{}];", qubit.0);
            }
            Instruction::Barrier { qubits } if qubits.is_empty() => out.push_str("barrier;\n"),
            Instruction::Barrier { qubits } => {
                let args: Vec<String> = qubits.iter().map(|q| format!("q[{}]", q.0)).collect();
                let _ = writeln!(out, "barrier {};", args.join(","));
            }
        }
    }
    out
}

/// Evaluates a gate parameter: numbers, `pi`, `+ - * /`, unary minus and
/// parentheses.
fn eval_angle(expr: &str) -> Result<f64, String> {
    let tokens = tokenize(expr)?;
    let mut pos = 0;
    let value = expr_sum(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(format!("unexpected trailing input in parameter `{}`", expr.trim()));
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Op(char),
}

fn tokenize(expr: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = expr.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || chars[i] == '.'
                    || chars[i] == 'e'
                    || chars[i] == 'E'
                    || ((chars[i] == '-' || chars[i] == '+')
                        && matches!(chars[i - 1], 'e' | 'E')))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| format!("bad number `{s}`"))?));
        } else if chars[i..].starts_with(&['p', 'i']) {
            out.push(Tok::Num(std::f64::consts::PI));
            i += 2;
        } else {
            return Err(format!("unexpected `{c}` in parameter"));
        }
    }
    Ok(out)
}

fn expr_sum(t: &[Tok], pos: &mut usize) -> Result<f64, String> {
    let mut acc = expr_product(t, pos)?;
    while let Some(Tok::Op(op @ ('+' | '-'))) = t.get(*pos) {
        *pos += 1;
        let rhs = expr_product(t, pos)?;
        acc = if *op == '+' { acc + rhs } else { acc - rhs };
    }
    Ok(acc)
}

fn expr_product(t: &[Tok], pos: &mut usize) -> Result<f64, String> {
    let mut acc = expr_unary(t, pos)?;
    while let Some(Tok::Op(op @ ('*' | '/'))) = t.get(*pos) {
        *pos += 1;
        let rhs = expr_unary(t, pos)?;
        acc = if *op == '*' { acc * rhs } else { acc / rhs };
    }
    Ok(acc)
}

fn expr_unary(t: &[Tok], pos: &mut usize) -> Result<f64, String> {
    match t.get(*pos) {
        Some(Tok::Op('-')) => {
            *pos += 1;
            Ok(-expr_unary(t, pos)?)
        }
        Some(Tok::Op('+')) => {
            *pos += 1;
            expr_unary(t, pos)
        }
        Some(Tok::Num(v)) => {
            *pos += 1;
            Ok(*v)
        }
        Some(Tok::Op('(')) => {
            *pos += 1;
            let v = expr_sum(t, pos)?;
            if t.get(*pos) != Some(&Tok::Op(')')) {
                return Err("missing `)` in parameter".to_string());
            }
            *pos += 1;
            Ok(v)
        }
        _ => Err("malformed parameter expression".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Form;
    use crate::testing::FIVE_QUBIT_QASM;

    #[test]
    fn parses_five_qubit_example() {
        let c = parse_circuit(FIVE_QUBIT_QASM).unwrap();
        assert_eq!(c.num_qubits(), 5);
        assert_eq!(c.instructions().len(), 9);
        assert_eq!(c.gate_count(), 3);
        assert!(matches!(c.instructions()[3], Instruction::Barrier { .. }));
        assert_eq!(c.form(), Form::Static);
    }

    #[test]
    fn minimal_circuit_without_creg() {
        let c = parse_circuit("qreg q[1]; measure q[0] -> c[0];").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert_eq!(c.num_clbits(), 1);
        assert_eq!(c.instructions(), &[Instruction::measure(0, 0)]);
    }

    #[test]
    fn empty_circuit_serializes_to_header() {
        let c = Circuit::new(0, 0, vec![]).unwrap();
        let text = serialize_circuit(&c);
        assert_eq!(text, "OPENQASM 2.0;\nqreg q[0];\ncreg c[0];\n");
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn reports_line_of_syntax_error() {
        let err = parse_circuit("qreg q[2];\ncreg c[2];\n\nmeasure q[0] c[0];\n").unwrap_err();
        assert!(matches!(err, CircuitError::Syntax { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn unknown_gate_is_rejected() {
        let err = parse_circuit("qreg q[2];\nccx q[0],q[1];").unwrap_err();
        assert_eq!(
            err,
            CircuitError::UnknownGate {
                line: 2,
                name: "ccx".into()
            }
        );
    }

    #[test]
    fn qubit_out_of_range() {
        let err = parse_circuit("qreg q[2];\nh q[2];").unwrap_err();
        assert_eq!(
            err,
            CircuitError::QubitOutOfRange {
                line: 2,
                index: 2,
                size: 2
            }
        );
    }

    #[test]
    fn arity_and_parameter_checks() {
        assert!(parse_circuit("qreg q[2]; cx q[0];").is_err());
        assert!(parse_circuit("qreg q[2]; cx q[0],q[0];").is_err());
        assert!(parse_circuit("qreg q[2]; rx q[0];").is_err());
        assert!(parse_circuit("qreg q[2]; h(0.1) q[0];").is_err());
        assert!(parse_circuit("qreg q[2]; h q[0]").is_err());
    }

    #[test]
    fn angle_expressions() {
        let c = parse_circuit("qreg q[1]; rz(-pi/2) q[0]; rx(2*(0.25+0.25)) q[0]; rz(1e-3) q[0];")
            .unwrap();
        let angles: Vec<f64> = c
            .instructions()
            .iter()
            .filter_map(|i| match i {
                Instruction::Gate { gate, .. } => gate.params(),
                _ => None,
            })
            .collect();
        assert_eq!(angles, vec![-std::f64::consts::FRAC_PI_2, 1.0, 1e-3]);
    }

    #[test]
    fn comments_and_whitespace() {
        let src = "// header\nOPENQASM 2.0;\nqreg   q [ 2 ] ;  creg c[2];\nh q[0]; // trailing\ncx q[0] ,\n q[1];\nbarrier q;\n// z0: q0 q1\n";
        let c = parse_circuit(src).unwrap();
        assert_eq!(c.instructions().len(), 3);
        assert_eq!(c.instructions()[2], Instruction::Barrier { qubits: vec![] });
    }

    #[test]
    fn reset_after_gate_makes_circuit_dynamic() {
        let c = parse_circuit("qreg q[1]; creg c[2]; h q[0]; measure q[0] -> c[0]; reset q[0]; measure q[0] -> c[1];").unwrap();
        assert_eq!(c.form(), Form::Dynamic);
        let c = parse_circuit("qreg q[1]; reset q[0]; h q[0];").unwrap();
        assert_eq!(c.form(), Form::Static);
    }

    #[test]
    fn clbit_written_twice_is_rejected() {
        assert!(parse_circuit("qreg q[2]; creg c[1]; measure q[0] -> c[0]; measure q[1] -> c[0];").is_err());
    }
}
