//! Small-scale correctness oracles.
//!
//! [`simulate_distribution`] computes the exact classical outcome
//! distribution of a circuit by following both outcomes of every measurement
//! and reset as a separate branch. [`equivalence_check`] compares a static
//! circuit with its dynamic rewrite through those distributions.
//! [`brute_force_min_width`] finds the narrowest valid reuse solution by
//! exhaustive search.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitDag, CircuitError, Gate, Instruction, QubitId};
use crate::matrices::ReuseMatrices;
use crate::rewrite::DynamicCircuit;
use crate::search::{ReuseSequence, ReuseSolution};

/// Widest circuit the simulator accepts.
pub const MAX_WIRES: usize = 12;
/// Most classical bits the simulator accepts.
pub const MAX_CLBITS: usize = 20;
/// Most qubits [`brute_force_min_width`] accepts.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 7;
/// Default total-variation tolerance for [`equivalence_check`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

// Branches lighter than this are dropped. Even 2^20 of them lose < 1e-9.
const PRUNE: f64 = 1e-16;
const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("circuit has {found} qubits; the simulator handles at most {max}")]
    TooManyWires { found: usize, max: usize },
    #[error("circuit has {found} classical bits; the simulator handles at most {max}")]
    TooManyClbits { found: usize, max: usize },
    #[error("circuit has {found} qubits; exhaustive search handles at most {max}")]
    TooManyQubits { found: usize, max: usize },
    #[error("branch probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2×2 unitary of a single-qubit gate.
///
/// # Panics
///
/// On two-qubit gates.
pub fn single_qubit_matrix(gate: Gate) -> Matrix2 {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let m = match gate {
        Gate::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        Gate::X => [[zero, one], [one, zero]],
        Gate::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        Gate::Z => [[one, zero], [zero, -one]],
        Gate::S => [[one, zero], [zero, c(0.0, 1.0)]],
        Gate::T => [[one, zero], [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        Gate::Sx => {
            let (p, m) = (c(0.5, 0.5), c(0.5, -0.5));
            [[p, m], [m, p]]
        }
        Gate::Sy => {
            let p = c(0.5, 0.5);
            [[p, -p], [p, p]]
        }
        Gate::Rx(theta) => {
            let (s, co) = (theta / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        Gate::Rz(theta) => [
            [Complex64::from_polar(1.0, -theta / 2.0), zero],
            [zero, Complex64::from_polar(1.0, theta / 2.0)],
        ],
        Gate::Cx | Gate::Cz => panic!("{} is a two-qubit gate", gate.name()),
    };
    debug_assert!(unitarity_error(&m) <= 1e-12, "{} is not unitary", gate.name());
    m
}

/// `‖U†U − I‖∞` (largest entry magnitude).
pub fn unitarity_error(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = c(0.0, 0.0);
            for row in m {
                acc += row[i].conj() * row[j];
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Amplitudes over `k` wires; wire `i` is bit `i` of the basis index.
/// `weight` is the probability of the branch that produced this state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    weight: f64,
}

impl StateVector {
    pub fn zero(wires: usize) -> StateVector {
        let mut amplitudes = vec![c(0.0, 0.0); 1 << wires];
        amplitudes[0] = c(1.0, 0.0);
        StateVector {
            amplitudes,
            weight: 1.0,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: Gate, qubits: &[QubitId]) {
        match gate {
            Gate::Cx => {
                let (ctl, tgt) = (1usize << qubits[0].0, 1usize << qubits[1].0);
                for i in 0..self.amplitudes.len() {
                    if i & ctl != 0 && i & tgt == 0 {
                        self.amplitudes.swap(i, i | tgt);
                    }
                }
            }
            Gate::Cz => {
                let mask = (1usize << qubits[0].0) | (1usize << qubits[1].0);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            _ => {
                let m = single_qubit_matrix(gate);
                let bit = 1usize << qubits[0].0;
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                        self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                        self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
    }

    /// Probability of reading 1 on `wire`.
    pub fn prob_one(&self, wire: QubitId) -> f64 {
        let bit = 1usize << wire.0;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `wire` onto `outcome`, which has probability `p`, and
    /// renormalizes.
    fn collapse(&mut self, wire: QubitId, outcome: bool, p: f64) {
        let bit = 1usize << wire.0;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = c(0.0, 0.0);
            }
        }
        self.weight *= p;
    }
}

/// Runs the gates of a circuit on `|0…0⟩`, skipping measurements and
/// barriers. Only meaningful for circuits whose measurements all come last.
pub fn final_state(circuit: &Circuit) -> Result<StateVector, VerifyError> {
    check_size(circuit)?;
    let mut state = StateVector::zero(circuit.num_qubits());
    for inst in circuit.instructions() {
        if let Instruction::Gate { gate, qubits } = inst {
            state.apply(*gate, qubits);
        }
    }
    Ok(state)
}

/// Probability of each classical register value. Keys have one character
/// per classical bit, bit 0 first; bits never written read `0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OutcomeDistribution {
    probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn get(&self, key: &str) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.probs.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// `½ Σ |p(x) − q(x)|`.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        let mut sum = 0.0;
        for (k, &p) in &self.probs {
            sum += (p - other.get(k)).abs();
        }
        for (k, &q) in &other.probs {
            if !self.probs.contains_key(k) {
                sum += q;
            }
        }
        sum / 2.0
    }
}

/// Distribution plus the number of leaf branches explored.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub distribution: OutcomeDistribution,
    pub branches: usize,
}

fn check_size(circuit: &Circuit) -> Result<(), VerifyError> {
    if circuit.num_qubits() > MAX_WIRES {
        return Err(VerifyError::TooManyWires {
            found: circuit.num_qubits(),
            max: MAX_WIRES,
        });
    }
    if circuit.num_clbits() > MAX_CLBITS {
        return Err(VerifyError::TooManyClbits {
            found: circuit.num_clbits(),
            max: MAX_CLBITS,
        });
    }
    Ok(())
}

/// The other outcome's state and value, when it is worth following.
type Split = Option<(StateVector, bool)>;

struct Explorer<'a> {
    instrs: &'a [Instruction],
    num_clbits: usize,
    probs: BTreeMap<String, f64>,
    branches: usize,
}

impl Explorer<'_> {
    fn run(&mut self, mut pc: usize, mut state: StateVector, mut bits: u32) {
        while pc < self.instrs.len() {
            match &self.instrs[pc] {
                Instruction::Gate { gate, qubits } => state.apply(*gate, qubits),
                Instruction::Barrier { .. } => {}
                Instruction::Measure { qubit, clbit } => {
                    let mask = 1u32 << clbit;
                    let Some((next, outcome)) = self.branch(&mut state, *qubit) else {
                        return;
                    };
                    if let Some((other, other_outcome)) = next {
                        let b = if other_outcome { bits | mask } else { bits & !mask };
                        self.run(pc + 1, other, b);
                    }
                    bits = if outcome { bits | mask } else { bits & !mask };
                }
                Instruction::Reset { qubit } => {
                    let Some((next, outcome)) = self.branch(&mut state, *qubit) else {
                        return;
                    };
                    if let Some((mut other, other_outcome)) = next {
                        if other_outcome {
                            other.apply(Gate::X, &[*qubit]);
                        }
                        self.run(pc + 1, other, bits);
                    }
                    if outcome {
                        state.apply(Gate::X, &[*qubit]);
                    }
                }
            }
            pc += 1;
        }
        let key: String = (0..self.num_clbits)
            .map(|k| if bits >> k & 1 == 1 { '1' } else { '0' })
            .collect();
        *self.probs.entry(key).or_insert(0.0) += state.weight;
        self.branches += 1;
    }

    /// Collapses `state` in place onto one outcome and returns the other
    /// outcome's state if it carries weight. `None` when both are
    /// negligible.
    fn branch(&mut self, state: &mut StateVector, wire: QubitId) -> Option<(Split, bool)> {
        let p1 = state.prob_one(wire).clamp(0.0, 1.0);
        let p0 = 1.0 - p1;
        let keep0 = state.weight * p0 >= PRUNE;
        let keep1 = state.weight * p1 >= PRUNE;
        match (keep0, keep1) {
            (true, true) => {
                let mut other = state.clone();
                other.collapse(wire, true, p1);
                state.collapse(wire, false, p0);
                Some((Some((other, true)), false))
            }
            (true, false) => {
                state.collapse(wire, false, p0);
                Some((None, false))
            }
            (false, true) => {
                state.collapse(wire, true, p1);
                Some((None, true))
            }
            (false, false) => None,
        }
    }
}

/// Exact outcome distribution of `circuit` started in `|0…0⟩`.
pub fn simulate(circuit: &Circuit) -> Result<Simulation, VerifyError> {
    check_size(circuit)?;
    let mut explorer = Explorer {
        instrs: circuit.instructions(),
        num_clbits: circuit.num_clbits(),
        probs: BTreeMap::new(),
        branches: 0,
    };
    explorer.run(0, StateVector::zero(circuit.num_qubits()), 0);
    let distribution = OutcomeDistribution {
        probs: explorer.probs,
    };
    let total = distribution.total();
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(VerifyError::NotNormalized(total));
    }
    Ok(Simulation {
        distribution,
        branches: explorer.branches,
    })
}

pub fn simulate_distribution(circuit: &Circuit) -> Result<OutcomeDistribution, VerifyError> {
    Ok(simulate(circuit)?.distribution)
}

impl AsRef<Circuit> for DynamicCircuit {
    fn as_ref(&self) -> &Circuit {
        self.circuit()
    }
}

impl AsRef<Circuit> for Circuit {
    fn as_ref(&self) -> &Circuit {
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub pass: bool,
    pub tvd: f64,
    /// Leaf branches explored over both simulations.
    pub branches: usize,
}

/// Compares the outcome distributions of two circuits; passes when their
/// total variation distance is at most `tol`.
pub fn equivalence_check(
    reference: &Circuit,
    candidate: impl AsRef<Circuit>,
    tol: f64,
) -> Result<EquivalenceReport, VerifyError> {
    let a = simulate(reference)?;
    let b = simulate(candidate.as_ref())?;
    let tvd = a.distribution.total_variation(&b.distribution);
    Ok(EquivalenceReport {
        pass: tvd <= tol,
        tvd,
        branches: a.branches + b.branches,
    })
}

/// Exact minimum width over every valid reuse solution.
pub fn brute_force_min_width(circuit: &Circuit) -> Result<usize, VerifyError> {
    Ok(brute_force_solution(circuit)?.width())
}

/// A narrowest valid reuse solution, found by backtracking over the
/// successor of each qubit.
///
/// The search keeps the root-to-terminal reachability of the DAG augmented
/// with the edges chosen so far. Edge `t_i → r_j` is allowed when neither
/// end is already linked and `r_j` cannot reach `t_i`; adding it lets every
/// root that reaches `t_i` reach every terminal `r_j` reaches.
pub fn brute_force_solution(circuit: &Circuit) -> Result<ReuseSolution, VerifyError> {
    let n = circuit.num_qubits();
    if n > MAX_BRUTE_FORCE_QUBITS {
        return Err(VerifyError::TooManyQubits {
            found: n,
            max: MAX_BRUTE_FORCE_QUBITS,
        });
    }
    let b = ReuseMatrices::of(&CircuitDag::build(circuit)?).biadjacency;
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| b.reaches(QubitId(i), QubitId(j))).collect())
        .collect();

    struct Search {
        n: usize,
        succ: Vec<Option<usize>>,
        has_pred: Vec<bool>,
        best_edges: usize,
        best: Vec<Option<usize>>,
    }

    impl Search {
        fn go(&mut self, i: usize, edges: usize, reach: &[Vec<bool>]) {
            if edges > self.best_edges {
                self.best_edges = edges;
                self.best = self.succ.clone();
            }
            // every remaining terminal adds at most one edge; a path cover
            // has at most n - 1 edges
            if i == self.n || edges + (self.n - i) <= self.best_edges || self.best_edges + 1 == self.n {
                return;
            }
            for j in 0..self.n {
                if self.has_pred[j] || reach[j][i] {
                    continue;
                }
                let mut next = reach.to_vec();
                for a in 0..self.n {
                    if reach[a][i] {
                        for bb in 0..self.n {
                            if reach[j][bb] {
                                next[a][bb] = true;
                            }
                        }
                    }
                }
                self.succ[i] = Some(j);
                self.has_pred[j] = true;
                self.go(i + 1, edges + 1, &next);
                self.succ[i] = None;
                self.has_pred[j] = false;
            }
            self.go(i + 1, edges, reach);
        }
    }

    let mut s = Search {
        n,
        succ: vec![None; n],
        has_pred: vec![false; n],
        best_edges: 0,
        best: vec![None; n],
    };
    if n > 0 {
        s.go(0, 0, &reach);
    }

    let mut has_pred = vec![false; n];
    for j in s.best.iter().flatten() {
        has_pred[*j] = true;
    }
    let sequences = (0..n)
        .filter(|&h| !has_pred[h])
        .map(|h| {
            let mut chain = vec![h];
            let mut cur = h;
            while let Some(next) = s.best[cur] {
                chain.push(next);
                cur = next;
            }
            ReuseSequence::from_indices(&chain)
        })
        .collect();
    Ok(ReuseSolution::new(sequences))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::rewrite::{rewrite_dynamic, validate_solution};
    use crate::search::{gidnet, SearchConfig};
    use crate::testing::{five_qubit_circuit, random_static_circuit};

    const ALL_SINGLE: [Gate; 10] = [
        Gate::H,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::S,
        Gate::T,
        Gate::Sx,
        Gate::Sy,
        Gate::Rx(0.37),
        Gate::Rz(-2.1),
    ];

    fn mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn close(a: &Matrix2, b: &Matrix2) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < 1e-12))
    }

    #[test]
    fn gate_matrices_are_unitary() {
        for g in ALL_SINGLE {
            assert!(unitarity_error(&single_qubit_matrix(g)) <= 1e-12, "{}", g.name());
        }
    }

    #[test]
    fn square_roots_square_to_paulis() {
        let sx = single_qubit_matrix(Gate::Sx);
        let sy = single_qubit_matrix(Gate::Sy);
        let t = single_qubit_matrix(Gate::T);
        assert!(close(&mul(&sx, &sx), &single_qubit_matrix(Gate::X)));
        assert!(close(&mul(&sy, &sy), &single_qubit_matrix(Gate::Y)));
        assert!(close(&mul(&t, &t), &single_qubit_matrix(Gate::S)));
    }

    #[test]
    fn five_qubit_example_is_deterministic() {
        let d = simulate_distribution(&five_qubit_circuit()).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.get("00000") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_coin() {
        let c = parse_circuit("qreg q[1]; creg c[1]; h q[0]; measure q[0] -> c[0];").unwrap();
        let d = simulate_distribution(&c).unwrap();
        assert!((d.get("0") - 0.5).abs() < 1e-12);
        assert!((d.get("1") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn key_puts_clbit_zero_first() {
        let c = parse_circuit("qreg q[2]; creg c[2]; x q[1]; measure q[0] -> c[0]; measure q[1] -> c[1];").unwrap();
        let d = simulate_distribution(&c).unwrap();
        assert!((d.get("01") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reset_restores_zero() {
        let c = parse_circuit(
            "qreg q[1]; creg c[2]; h q[0]; measure q[0] -> c[0]; reset q[0]; measure q[0] -> c[1];",
        )
        .unwrap();
        let d = simulate_distribution(&c).unwrap();
        assert!((d.get("00") - 0.5).abs() < 1e-12);
        assert!((d.get("10") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unmeasured_reset_branches_without_recording() {
        let c = parse_circuit("qreg q[1]; creg c[1]; h q[0]; reset q[0]; measure q[0] -> c[0];").unwrap();
        let s = simulate(&c).unwrap();
        assert!((s.distribution.get("0") - 1.0).abs() < 1e-12);
        assert_eq!(s.branches, 2);
    }

    #[test]
    fn matches_plain_statevector() {
        for seed in 0..30 {
            let c = random_static_circuit(5, 20, seed);
            let d = simulate_distribution(&c).unwrap();
            let state = final_state(&c).unwrap();
            for (i, a) in state.amplitudes().iter().enumerate() {
                let key: String = (0..5).map(|k| if i >> k & 1 == 1 { '1' } else { '0' }).collect();
                assert!((d.get(&key) - a.norm_sqr()).abs() < 1e-12, "seed {seed} key {key}");
            }
        }
    }

    #[test]
    fn size_limits() {
        let c = parse_circuit("qreg q[13];").unwrap();
        assert!(matches!(simulate(&c), Err(VerifyError::TooManyWires { .. })));
        let c = parse_circuit("qreg q[1]; creg c[21];").unwrap();
        assert!(matches!(simulate(&c), Err(VerifyError::TooManyClbits { .. })));
        let c = parse_circuit("qreg q[8];").unwrap();
        assert!(matches!(
            brute_force_min_width(&c),
            Err(VerifyError::TooManyQubits { found: 8, max: 7 })
        ));
    }

    #[test]
    fn five_qubit_rewrite_is_equivalent() {
        let c = five_qubit_circuit();
        let sol = ReuseSolution::new(vec![
            ReuseSequence::from_indices(&[0, 2, 3, 1]),
            ReuseSequence::from_indices(&[4]),
        ]);
        let d = rewrite_dynamic(&c, &sol).unwrap();
        let r = equivalence_check(&c, &d, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass);
        assert_eq!(r.tvd, 0.0);
    }

    #[test]
    fn self_equivalence() {
        let c = random_static_circuit(4, 10, 3);
        let r = equivalence_check(&c, &c, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass);
        assert_eq!(r.tvd, 0.0);
    }

    #[test]
    fn deleting_a_reset_is_detected() {
        let c = parse_circuit("qreg q[2]; creg c[2]; x q[0]; measure q[0] -> c[0]; measure q[1] -> c[1];").unwrap();
        let sol = ReuseSolution::new(vec![ReuseSequence::from_indices(&[0, 1])]);
        let d = rewrite_dynamic(&c, &sol).unwrap();
        assert!(equivalence_check(&c, &d, DEFAULT_TOLERANCE).unwrap().pass);
        let mutated: Vec<Instruction> = d
            .circuit()
            .instructions()
            .iter()
            .filter(|i| !matches!(i, Instruction::Reset { .. }))
            .cloned()
            .collect();
        let mutated = Circuit::new(1, 2, mutated).unwrap();
        let r = equivalence_check(&c, &mutated, DEFAULT_TOLERANCE).unwrap();
        assert!(!r.pass);
        assert!((r.tvd - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_reference_values() {
        assert_eq!(brute_force_min_width(&five_qubit_circuit()).unwrap(), 2);
        assert_eq!(brute_force_min_width(&parse_circuit("qreg q[4];").unwrap()).unwrap(), 1);
        let irreducible =
            parse_circuit("qreg q[3]; cx q[0],q[1]; cx q[1],q[2]; cx q[2],q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(brute_force_min_width(&irreducible).unwrap(), 3);
        assert_eq!(brute_force_min_width(&parse_circuit("qreg q[0];").unwrap()).unwrap(), 0);
    }

    #[test]
    fn brute_force_solutions_are_valid() {
        for seed in 0..60 {
            let n = 2 + seed as usize % 6;
            let c = random_static_circuit(n, 2 * n, seed);
            let sol = brute_force_solution(&c).unwrap();
            assert!(validate_solution(&c, &sol).unwrap().pass, "seed {seed}");
        }
    }

    /// Every ordered partition into chains, checked with the validator.
    fn exhaustive_min_width(c: &Circuit) -> usize {
        let n = c.num_qubits();
        // successor assignment: succ[i] in 0..=n, n meaning none
        let mut best = n;
        let total = (n + 1).pow(n as u32);
        for code in 0..total {
            let mut succ = vec![n; n];
            let mut x = code;
            for s in succ.iter_mut() {
                *s = x % (n + 1);
                x /= n + 1;
            }
            let mut pred_count = vec![0; n];
            for &s in &succ {
                if s < n {
                    pred_count[s] += 1;
                }
            }
            if pred_count.iter().any(|&k| k > 1) || (0..n).any(|i| succ[i] == i) {
                continue;
            }
            let heads: Vec<usize> = (0..n).filter(|&i| pred_count[i] == 0).collect();
            let mut seqs = Vec::new();
            let mut covered = 0;
            for &h in &heads {
                let mut chain = vec![h];
                let mut cur = h;
                while succ[cur] < n {
                    cur = succ[cur];
                    chain.push(cur);
                }
                covered += chain.len();
                seqs.push(ReuseSequence::from_indices(&chain));
            }
            if covered != n {
                continue; // some successor cycle
            }
            let sol = ReuseSolution::new(seqs);
            if sol.width() < best && validate_solution(c, &sol).unwrap().pass {
                best = sol.width();
            }
        }
        best
    }

    #[test]
    fn brute_force_matches_exhaustive_enumeration() {
        for seed in 0..40 {
            let n = 2 + seed as usize % 4;
            let c = random_static_circuit(n, 2 * n, 1000 + seed);
            assert_eq!(brute_force_min_width(&c).unwrap(), exhaustive_min_width(&c), "seed {seed}");
        }
    }

    #[test]
    fn gidnet_rewrites_are_equivalent() {
        for seed in 0..60 {
            let n = 2 + seed as usize % 5;
            let c = random_static_circuit(n, 10, seed);
            let sol = gidnet(&c, &SearchConfig::with_seed(seed)).unwrap();
            let d = rewrite_dynamic(&c, &sol).unwrap();
            let r = equivalence_check(&c, &d, DEFAULT_TOLERANCE).unwrap();
            assert!(r.pass, "seed {seed}: tvd {}", r.tvd);
            assert!(sol.width() >= brute_force_min_width(&c).unwrap());
        }
    }
}
