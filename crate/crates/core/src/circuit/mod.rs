//! Circuit data model.
//!
//! A [`Circuit`] is an ordered list of [`Instruction`]s over `num_qubits`
//! logical qubits and `num_clbits` classical bits. Circuits come in two
//! forms: *static*, where every qubit occupies its own wire for the whole
//! execution and its measurement is its final operation, and *dynamic*, where
//! wires are measured and reset mid-circuit so they can be reused.

mod dag;
mod qasm;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dag::{build_dag, CircuitDag, Node, NodeId};
pub use qasm::{parse_circuit, serialize_circuit};

/// Index of a qubit (logical or virtual, depending on context).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

impl QubitId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

impl From<usize> for QubitId {
    fn from(i: usize) -> Self {
        QubitId(i)
    }
}

/// Supported gates. Rotation gates carry their angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    T,
    /// `X^{1/2}`
    Sx,
    /// `Y^{1/2}`
    Sy,
    Rx(f64),
    Rz(f64),
    Cx,
    Cz,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::S => "s",
            Gate::T => "t",
            Gate::Sx => "sx",
            Gate::Sy => "sy",
            Gate::Rx(_) => "rx",
            Gate::Rz(_) => "rz",
            Gate::Cx => "cx",
            Gate::Cz => "cz",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::Cx | Gate::Cz => 2,
            _ => 1,
        }
    }

    pub fn params(&self) -> Option<f64> {
        match *self {
            Gate::Rx(theta) | Gate::Rz(theta) => Some(theta),
            _ => None,
        }
    }

    /// Builds a gate from its mnemonic and parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Gate, GateSpecError> {
        let gate = match name {
            "h" => Gate::H,
            "x" => Gate::X,
            "y" => Gate::Y,
            "z" => Gate::Z,
            "s" => Gate::S,
            "t" => Gate::T,
            "sx" => Gate::Sx,
            "sy" => Gate::Sy,
            "cx" | "CX" => Gate::Cx,
            "cz" => Gate::Cz,
            "rx" | "rz" => {
                let [theta] = params else {
                    return Err(GateSpecError::ParamCount {
                        name: name.to_string(),
                        expected: 1,
                        found: params.len(),
                    });
                };
                return Ok(if name == "rx" {
                    Gate::Rx(*theta)
                } else {
                    Gate::Rz(*theta)
                });
            }
            _ => return Err(GateSpecError::Unknown(name.to_string())),
        };
        if !params.is_empty() {
            return Err(GateSpecError::ParamCount {
                name: name.to_string(),
                expected: 0,
                found: params.len(),
            });
        }
        Ok(gate)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateSpecError {
    #[error("unknown gate `{0}`")]
    Unknown(String),
    #[error("gate `{name}` takes {expected} parameter(s), found {found}")]
    ParamCount {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate { gate: Gate, qubits: Vec<QubitId> },
    Measure { qubit: QubitId, clbit: usize },
    Reset { qubit: QubitId },
    /// An empty qubit list means the barrier spans the whole register.
    Barrier { qubits: Vec<QubitId> },
}

impl Instruction {
    pub fn gate(gate: Gate, qubits: &[usize]) -> Instruction {
        Instruction::Gate {
            gate,
            qubits: qubits.iter().copied().map(QubitId).collect(),
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Instruction {
        Instruction::Measure {
            qubit: QubitId(qubit),
            clbit,
        }
    }

    pub fn reset(qubit: usize) -> Instruction {
        Instruction::Reset {
            qubit: QubitId(qubit),
        }
    }

    /// Qubits this instruction acts on.
    pub fn qubits(&self) -> &[QubitId] {
        match self {
            Instruction::Gate { qubits, .. } | Instruction::Barrier { qubits } => qubits,
            Instruction::Measure { qubit, .. } | Instruction::Reset { qubit } => {
                std::slice::from_ref(qubit)
            }
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, Instruction::Gate { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("line {line}: qubit index {index} out of range for register of size {size}")]
    QubitOutOfRange {
        line: usize,
        index: usize,
        size: usize,
    },
    #[error("instruction {instruction}: {message}")]
    Invalid { instruction: usize, message: String },
    #[error("operation requires a static circuit")]
    NotStatic,
}

/// An ordered list of instructions over a fixed qubit and classical register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction>,
    form: Form,
}

impl Circuit {
    /// Validates the instruction list and classifies the circuit as static
    /// or dynamic.
    ///
    /// A circuit is static when no qubit is touched after its measurement and
    /// resets only appear before the first gate on their qubit.
    pub fn new(
        num_qubits: usize,
        num_clbits: usize,
        instructions: Vec<Instruction>,
    ) -> Result<Circuit, CircuitError> {
        let mut clbit_written = vec![false; num_clbits];
        // per qubit: has it seen a gate, has it been measured
        let mut touched = vec![false; num_qubits];
        let mut measured = vec![false; num_qubits];
        let mut form = Form::Static;

        for (idx, inst) in instructions.iter().enumerate() {
            let invalid = |message: String| CircuitError::Invalid {
                instruction: idx,
                message,
            };
            for q in inst.qubits() {
                if q.0 >= num_qubits {
                    return Err(invalid(format!(
                        "qubit {} out of range for {} qubits",
                        q.0, num_qubits
                    )));
                }
            }
            match inst {
                Instruction::Gate { gate, qubits } => {
                    if qubits.len() != gate.arity() {
                        return Err(invalid(format!(
                            "gate `{}` takes {} qubit(s), found {}",
                            gate.name(),
                            gate.arity(),
                            qubits.len()
                        )));
                    }
                    if qubits.len() == 2 && qubits[0] == qubits[1] {
                        return Err(invalid(format!(
                            "gate `{}` needs two distinct qubits",
                            gate.name()
                        )));
                    }
                    for q in qubits {
                        if measured[q.0] {
                            form = Form::Dynamic;
                        }
                        touched[q.0] = true;
                    }
                }
                Instruction::Measure { qubit, clbit } => {
                    if *clbit >= num_clbits {
                        return Err(invalid(format!(
                            "classical bit {} out of range for {} bits",
                            clbit, num_clbits
                        )));
                    }
                    if std::mem::replace(&mut clbit_written[*clbit], true) {
                        return Err(invalid(format!("classical bit {clbit} written twice")));
                    }
                    if measured[qubit.0] {
                        form = Form::Dynamic;
                    }
                    measured[qubit.0] = true;
                    touched[qubit.0] = true;
                }
                Instruction::Reset { qubit } => {
                    if touched[qubit.0] {
                        form = Form::Dynamic;
                    }
                }
                Instruction::Barrier { .. } => {}
            }
        }

        Ok(Circuit {
            num_qubits,
            num_clbits,
            instructions,
            form,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn is_static(&self) -> bool {
        self.form == Form::Static
    }

    pub fn gate_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.is_gate()).count()
    }

    /// Classical bit each qubit is measured into, if any. Only meaningful
    /// for static circuits, where each qubit is measured at most once.
    pub fn measurement_clbits(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.num_qubits];
        for inst in &self.instructions {
            if let Instruction::Measure { qubit, clbit } = inst {
                out[qubit.0].get_or_insert(*clbit);
            }
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_circuit(self))
    }
}
