//! Small reference circuits.

use crate::circuit::{parse_circuit, Circuit};

/// Five qubits; qubit 4 is the target of CNOTs controlled by qubits 0, 2
/// and 3, followed by a barrier and a full measurement.
pub const FIVE_QUBIT_QASM: &str = "\
OPENQASM 2.0;
qreg q[5];
creg c[5];
cx q[0],q[4];
cx q[2],q[4];
cx q[3],q[4];
barrier q[0],q[1],q[2],q[3],q[4];
measure q[0] -> c[0];
measure q[1] -> c[1];
measure q[2] -> c[2];
measure q[3] -> c[3];
measure q[4] -> c[4];
";

pub fn five_qubit_circuit() -> Circuit {
    parse_circuit(FIVE_QUBIT_QASM).expect("fixture parses")
}
