//! Qubit reuse compilation for static quantum circuits.
//!
//! A static circuit gives every logical qubit its own physical wire and
//! measures each qubit once at the end. Many of those wires sit idle for long
//! stretches: once a qubit has been measured nothing stops another qubit from
//! being reset onto the same wire, provided no gate dependency forces the
//! second qubit to start before the first one finishes.
//!
//! This crate finds such reuse opportunities and rewrites the circuit into a
//! narrower *dynamic* circuit that uses mid-circuit measurement and reset.
//!
//! ```
//! use gidnet::{gidnet, rewrite_dynamic, parse_circuit, SearchConfig};
//!
//! let circuit = parse_circuit(gidnet::fixtures::FIVE_QUBIT_QASM).unwrap();
//! let solution = gidnet(&circuit, &SearchConfig::with_seed(7)).unwrap();
//! assert_eq!(solution.width(), 2);
//!
//! let dynamic = rewrite_dynamic(&circuit, &solution).unwrap();
//! assert_eq!(dynamic.circuit().num_qubits(), 2);
//! ```

pub mod benchgen;
pub mod circuit;
pub mod fixtures;
pub mod harness;
pub mod matrices;
pub mod rewrite;
pub mod search;
pub mod verify;

#[cfg(test)]
mod testing;

pub use circuit::{parse_circuit, serialize_circuit, Circuit, CircuitDag, Gate, Instruction, QubitId};
pub use matrices::{BiadjacencyMatrix, CandidateMatrix, ReuseMatrices};
pub use rewrite::{rewrite_dynamic, validate_solution, DynamicCircuit};
pub use search::{gidnet, Iterations, ReuseSequence, ReuseSolution, SearchConfig};
pub use verify::equivalence_check;
