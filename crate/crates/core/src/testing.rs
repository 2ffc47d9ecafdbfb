//! Shared helpers for unit tests.

pub use crate::benchgen::random_circuit as random_static_circuit;
pub use crate::fixtures::{five_qubit_circuit, FIVE_QUBIT_QASM};

/// Biadjacency matrix of the five-qubit fixture, rows r0..r4.
pub fn expected_biadjacency() -> Vec<&'static str> {
    vec!["10111", "01000", "00111", "00011", "10111"]
}

/// Candidate matrix of the five-qubit fixture, rows t0..t4.
pub fn expected_candidate() -> Vec<&'static str> {
    vec!["01110", "10111", "01010", "01000", "01000"]
}
