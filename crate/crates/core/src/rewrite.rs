//! Rewriting a static circuit into a dynamic one from a reuse solution.
//!
//! Each reuse sequence becomes one virtual qubit `z_i`. The static DAG is
//! augmented with an edge from the terminal of every sequence member to the
//! root of the next, and the augmented DAG is emitted in topological order.
//! When a terminal is reached the logical qubit is measured into its
//! original classical bit and, if another member follows on the same wire,
//! the wire is reset.
//!
//! Barriers are dropped: they would span wires that now carry several
//! logical qubits and no longer mean what they meant in the static circuit.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{serialize_circuit, Circuit, CircuitDag, CircuitError, Instruction, Node, QubitId};
use crate::matrices::ReuseMatrices;
use crate::search::ReuseSolution;

/// The first constraint a solution breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A qubit appears twice, is out of range, is missing, or a sequence is
    /// empty.
    Partition { message: String },
    /// `root` may not follow `terminal` on a wire.
    IllegalPair { terminal: usize, root: usize },
    /// The augmented DAG has a cycle.
    Cycle,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Partition { message } => write!(f, "partition: {message}"),
            Violation::IllegalPair { terminal, root } => {
                write!(f, "illegal pair: q{root} may not follow q{terminal}")
            }
            Violation::Cycle => f.write_str("augmented DAG is cyclic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub pass: bool,
    pub violation: Option<Violation>,
}

impl ValidityReport {
    fn fail(v: Violation) -> ValidityReport {
        ValidityReport {
            pass: false,
            violation: Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("invalid reuse solution: {0}")]
    Invalid(Violation),
}

/// Checks that `solution` partitions the qubits of `circuit`, that each
/// consecutive pair is a candidate edge, and that the augmented DAG is
/// acyclic, in that order.
pub fn validate_solution(
    circuit: &Circuit,
    solution: &ReuseSolution,
) -> Result<ValidityReport, CircuitError> {
    let dag = CircuitDag::build(circuit)?;
    Ok(check(&dag, solution))
}

fn check(dag: &CircuitDag, solution: &ReuseSolution) -> ValidityReport {
    let n = dag.num_qubits();
    let mut seen = vec![false; n];
    for (i, s) in solution.sequences().iter().enumerate() {
        if s.is_empty() {
            return ValidityReport::fail(Violation::Partition {
                message: format!("sequence {i} is empty"),
            });
        }
        for q in s.qubits() {
            if q.0 >= n {
                return ValidityReport::fail(Violation::Partition {
                    message: format!("{q} is not a qubit of a {n}-qubit circuit"),
                });
            }
            if std::mem::replace(&mut seen[q.0], true) {
                return ValidityReport::fail(Violation::Partition {
                    message: format!("{q} appears more than once"),
                });
            }
        }
    }
    if let Some(q) = seen.iter().position(|s| !s) {
        return ValidityReport::fail(Violation::Partition {
            message: format!("q{q} is not covered"),
        });
    }

    let candidate = ReuseMatrices::of(dag).candidate;
    for s in solution.sequences() {
        for (a, b) in s.edges() {
            if !candidate.allows(a, b) {
                return ValidityReport::fail(Violation::IllegalPair {
                    terminal: a.0,
                    root: b.0,
                });
            }
        }
    }
    if !augment(dag, solution).is_acyclic() {
        return ValidityReport::fail(Violation::Cycle);
    }
    ValidityReport {
        pass: true,
        violation: None,
    }
}

fn augment(dag: &CircuitDag, solution: &ReuseSolution) -> CircuitDag {
    let mut aug = dag.clone();
    for s in solution.sequences() {
        for (a, b) in s.edges() {
            aug.add_edge(aug.terminal(a), aug.root(b), b);
        }
    }
    aug
}

/// One wire of the dynamic circuit and the logical qubits it carries, in
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VirtualQubit {
    pub index: usize,
    pub segments: Vec<QubitId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicCircuit {
    circuit: Circuit,
    mapping: Vec<VirtualQubit>,
    clbits: Vec<Option<usize>>,
}

impl DynamicCircuit {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn mapping(&self) -> &[VirtualQubit] {
        &self.mapping
    }

    pub fn width(&self) -> usize {
        self.mapping.len()
    }

    /// Classical bit recording each logical qubit, if it is measured.
    pub fn clbit_of(&self, logical: QubitId) -> Option<usize> {
        self.clbits.get(logical.0).copied().flatten()
    }

    /// Circuit text with one `// z<i>: q<a> q<b> ...` line per wire after
    /// the version header.
    pub fn to_qasm(&self) -> String {
        let body = serialize_circuit(&self.circuit);
        let (header, rest) = body.split_once('\n').unwrap_or((&body, ""));
        let mut out = format!("{header}\n");
        for v in &self.mapping {
            let _ = write!(out, "// z{}:", v.index);
            for q in &v.segments {
                let _ = write!(out, " {q}");
            }
            out.push('\n');
        }
        out.push_str(rest);
        out
    }
}

/// Builds the dynamic circuit for `solution`.
///
/// Ready vertices are emitted in order of (virtual qubit, original
/// instruction index). A gate spanning two wires is keyed by the lower one;
/// a terminal by the index of its static measurement, or after every
/// instruction if the qubit was never measured.
pub fn rewrite_dynamic(circuit: &Circuit, solution: &ReuseSolution) -> Result<DynamicCircuit, RewriteError> {
    let dag = CircuitDag::build(circuit)?;
    let report = check(&dag, solution);
    if let Some(v) = report.violation {
        return Err(RewriteError::Invalid(v));
    }
    let aug = augment(&dag, solution);
    let n = circuit.num_qubits();
    let instrs = circuit.instructions();

    let mut virt = vec![0usize; n];
    let mut has_next = vec![false; n];
    let mut mapping = Vec::with_capacity(solution.width());
    for (i, s) in solution.sequences().iter().enumerate() {
        for (k, q) in s.qubits().iter().enumerate() {
            virt[q.0] = i;
            has_next[q.0] = k + 1 < s.len();
        }
        mapping.push(VirtualQubit {
            index: i,
            segments: s.qubits().to_vec(),
        });
    }

    let mut measure_at = vec![None; n];
    for (idx, inst) in instrs.iter().enumerate() {
        if let Instruction::Measure { qubit, .. } = inst {
            measure_at[qubit.0].get_or_insert(idx);
        }
    }
    let clbits = circuit.measurement_clbits();

    let key = |v: usize| -> (usize, usize, usize) {
        match aug.node(v) {
            Node::Root(q) => (virt[q.0], 0, v),
            Node::Op(i) => {
                let lowest = instrs[i]
                    .qubits()
                    .iter()
                    .map(|q| virt[q.0])
                    .min()
                    .expect("operations act on at least one qubit");
                (lowest, i + 1, v)
            }
            Node::Terminal(q) => {
                let order = measure_at[q.0].map_or(instrs.len() + 1 + q.0, |m| m + 1);
                (virt[q.0], order, v)
            }
        }
    };

    let mut indeg: Vec<usize> = (0..aug.num_nodes()).map(|v| aug.in_degree(v)).collect();
    let mut ready: BinaryHeap<Reverse<(usize, usize, usize)>> = (0..aug.num_nodes())
        .filter(|&v| indeg[v] == 0)
        .map(|v| Reverse(key(v)))
        .collect();
    let remap = |qs: &[QubitId]| -> Vec<QubitId> { qs.iter().map(|q| QubitId(virt[q.0])).collect() };
    let mut out = Vec::with_capacity(instrs.len() + n);
    let mut emitted = 0usize;

    while let Some(Reverse((_, _, v))) = ready.pop() {
        emitted += 1;
        match aug.node(v) {
            Node::Root(_) => {}
            Node::Op(i) => out.push(match &instrs[i] {
                Instruction::Gate { gate, qubits } => Instruction::Gate {
                    gate: *gate,
                    qubits: remap(qubits),
                },
                Instruction::Reset { qubit } => Instruction::Reset {
                    qubit: QubitId(virt[qubit.0]),
                },
                other => unreachable!("DAG operation vertex holds {other:?}"),
            }),
            Node::Terminal(q) => {
                let wire = QubitId(virt[q.0]);
                if let Some(clbit) = clbits[q.0] {
                    out.push(Instruction::Measure { qubit: wire, clbit });
                }
                if has_next[q.0] {
                    out.push(Instruction::Reset { qubit: wire });
                }
            }
        }
        // parallel edges appear once per shared qubit, matching in_degree
        for w in aug.successors(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(Reverse(key(w)));
            }
        }
    }
    debug_assert_eq!(emitted, aug.num_nodes());

    let dynamic = Circuit::new(solution.width(), circuit.num_clbits(), out)?;
    Ok(DynamicCircuit {
        circuit: dynamic,
        mapping,
        clbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Form, Gate};
    use crate::search::{gidnet, ReuseSequence, SearchConfig};
    use crate::testing::{five_qubit_circuit, random_static_circuit};

    fn seqs(s: &[&[usize]]) -> ReuseSolution {
        ReuseSolution::new(s.iter().map(|x| ReuseSequence::from_indices(x)).collect())
    }

    #[test]
    fn five_qubit_layout() {
        let d = rewrite_dynamic(&five_qubit_circuit(), &seqs(&[&[0, 2, 3, 1], &[4]])).unwrap();
        let expected = [
            Instruction::gate(Gate::Cx, &[0, 1]),
            Instruction::measure(0, 0),
            Instruction::reset(0),
            Instruction::gate(Gate::Cx, &[0, 1]),
            Instruction::measure(0, 2),
            Instruction::reset(0),
            Instruction::gate(Gate::Cx, &[0, 1]),
            Instruction::measure(0, 3),
            Instruction::reset(0),
            Instruction::measure(0, 1),
            Instruction::measure(1, 4),
        ];
        assert_eq!(d.circuit().instructions(), &expected);
        assert_eq!(d.circuit().form(), Form::Dynamic);
        assert_eq!(d.width(), 2);
        assert_eq!(d.clbit_of(QubitId(3)), Some(3));
        let text = d.to_qasm();
        assert!(text.starts_with("OPENQASM 2.0;\n// z0: q0 q2 q3 q1\n// z1: q4\nqreg q[2];\ncreg c[5];\n"));
        assert_eq!(parse_circuit(&text).unwrap(), *d.circuit());
    }

    #[test]
    fn validity_examples() {
        let c = five_qubit_circuit();
        let ok = validate_solution(&c, &seqs(&[&[0, 2, 3, 1], &[4]])).unwrap();
        assert!(ok.pass);
        let bad = validate_solution(&c, &seqs(&[&[4, 0], &[1], &[2], &[3]])).unwrap();
        assert_eq!(bad.violation, Some(Violation::IllegalPair { terminal: 4, root: 0 }));
        let dup = validate_solution(&c, &seqs(&[&[0, 1], &[1, 2], &[3], &[4]])).unwrap();
        assert!(matches!(dup.violation, Some(Violation::Partition { .. })));
        let missing = validate_solution(&c, &seqs(&[&[0, 1], &[2]])).unwrap();
        assert!(matches!(missing.violation, Some(Violation::Partition { .. })));
        let range = validate_solution(&c, &seqs(&[&[0, 1, 2, 3, 4, 9]])).unwrap();
        assert!(matches!(range.violation, Some(Violation::Partition { .. })));
    }

    #[test]
    fn legal_pairs_can_still_close_a_cycle() {
        // q1 feeds q2 and q3 feeds q0. Putting q3 after q2 and q1 after q0
        // is legal pair by pair, but together the two edges close a loop.
        let c = parse_circuit("qreg q[4]; cx q[1],q[2]; cx q[3],q[0];").unwrap();
        let m = ReuseMatrices::of(&CircuitDag::build(&c).unwrap()).candidate;
        assert!(m.allows(QubitId(2), QubitId(3)));
        assert!(m.allows(QubitId(0), QubitId(1)));
        let r = validate_solution(&c, &seqs(&[&[2, 3], &[0, 1]])).unwrap();
        assert_eq!(r.violation, Some(Violation::Cycle));
        assert!(matches!(
            rewrite_dynamic(&c, &seqs(&[&[2, 3], &[0, 1]])),
            Err(RewriteError::Invalid(Violation::Cycle))
        ));
    }

    fn per_qubit_gates(c: &Circuit) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); c.num_qubits()];
        for inst in c.instructions() {
            if let Instruction::Gate { gate, qubits } = inst {
                for (k, q) in qubits.iter().enumerate() {
                    out[q.0].push(format!("{}:{k}:{:?}", gate.name(), gate.params()));
                }
            }
        }
        out
    }

    #[test]
    fn singleton_rewrite_preserves_gates() {
        for seed in 0..40 {
            let c = random_static_circuit(5, 12, seed);
            let d = rewrite_dynamic(&c, &ReuseSolution::all_singletons(5)).unwrap();
            assert_eq!(per_qubit_gates(&c), per_qubit_gates(d.circuit()));
            assert!(!d
                .circuit()
                .instructions()
                .iter()
                .any(|i| matches!(i, Instruction::Reset { .. })));
        }
    }

    #[test]
    fn instruction_count_formula() {
        for seed in 0..60 {
            let n = 2 + seed as usize % 6;
            let c = random_static_circuit(n, 2 * n, seed);
            let sol = gidnet(&c, &SearchConfig::with_seed(seed)).unwrap();
            let d = rewrite_dynamic(&c, &sol).unwrap();
            let resets: usize = sol.sequences().iter().map(|s| s.len() - 1).sum();
            assert_eq!(d.circuit().instructions().len(), c.gate_count() + n + resets);
            assert_eq!(d.circuit().num_qubits(), sol.width());
        }
    }

    #[test]
    fn clbits_follow_logical_qubits() {
        let c = parse_circuit(
            "qreg q[3]; creg c[3]; h q[0]; cx q[0],q[1]; measure q[0] -> c[2]; measure q[1] -> c[0]; measure q[2] -> c[1];",
        )
        .unwrap();
        let d = rewrite_dynamic(&c, &seqs(&[&[2, 0], &[1]])).unwrap();
        let measured: Vec<(usize, usize)> = d
            .circuit()
            .instructions()
            .iter()
            .filter_map(|i| match i {
                Instruction::Measure { qubit, clbit } => Some((qubit.0, *clbit)),
                _ => None,
            })
            .collect();
        // q2 -> c1 on z0, then q0 -> c2 on z0, q1 -> c0 on z1
        assert!(measured.contains(&(0, 1)));
        assert!(measured.contains(&(0, 2)));
        assert!(measured.contains(&(1, 0)));
    }

    #[test]
    fn unmeasured_qubit_still_resets() {
        let c = parse_circuit("qreg q[2]; creg c[1]; x q[0]; measure q[1] -> c[0];").unwrap();
        let d = rewrite_dynamic(&c, &seqs(&[&[0, 1]])).unwrap();
        assert_eq!(
            d.circuit().instructions(),
            &[
                Instruction::gate(Gate::X, &[0]),
                Instruction::reset(0),
                Instruction::measure(0, 0)
            ]
        );
    }

    #[test]
    fn rewrite_is_deterministic() {
        let c = random_static_circuit(6, 14, 5);
        let sol = gidnet(&c, &SearchConfig::with_seed(2)).unwrap();
        assert_eq!(
            rewrite_dynamic(&c, &sol).unwrap().to_qasm(),
            rewrite_dynamic(&c, &sol).unwrap().to_qasm()
        );
    }
}
