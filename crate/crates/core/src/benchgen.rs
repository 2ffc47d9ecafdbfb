//! Seeded benchmark circuit generators.
//!
//! * [`gen_grcs`]: random-circuit-sampling style circuits on an `rows × cols`
//!   lattice, with CZ layers drawn from a fixed cyclic schedule.
//! * [`gen_u3r`] and [`gen_qaoa`]: QAOA MaxCut circuits on random 3-regular
//!   graphs.
//! * [`random_circuit`]: unstructured random circuits for tests and fuzzing.
//!
//! Every generator is a pure function of its arguments.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, Instruction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchgenError {
    #[error("lattice dimensions must be positive, got {rows}x{cols}")]
    EmptyLattice { rows: usize, cols: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("3-regular graphs need an even vertex count of at least 4, got {0}")]
    BadVertexCount(usize),
    #[error("expected {p} angles per list, got {betas} betas and {gammas} gammas")]
    AngleCount { p: usize, betas: usize, gammas: usize },
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

/// Orientation of a lattice coupler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// One CZ layer: couplers of one orientation whose leading coordinate has
/// parity `offset` and whose other coordinate has parity `stagger`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CzPattern {
    pub orientation: Orientation,
    pub offset: usize,
    pub stagger: usize,
}

/// The eight CZ layers, applied in this order and repeated.
pub const CZ_SCHEDULE: [CzPattern; 8] = {
    use Orientation::{Horizontal as H, Vertical as V};
    const fn p(orientation: Orientation, offset: usize, stagger: usize) -> CzPattern {
        CzPattern {
            orientation,
            offset,
            stagger,
        }
    }
    [
        p(H, 0, 0),
        p(H, 1, 1),
        p(V, 0, 0),
        p(V, 1, 1),
        p(H, 0, 1),
        p(H, 1, 0),
        p(V, 0, 1),
        p(V, 1, 0),
    ]
};

impl CzPattern {
    /// Qubit pairs `(a, b)` with `a < b`, qubit `(r, c)` having index
    /// `r * cols + c`.
    ///
    /// A horizontal coupler `(r, c)-(r, c+1)` belongs to the pattern when
    /// `c % 2 == offset` and `r % 2 == stagger`; a vertical coupler
    /// `(r, c)-(r+1, c)` when `r % 2 == offset` and `c % 2 == stagger`.
    pub fn edges(&self, rows: usize, cols: usize) -> Vec<(usize, usize)> {
        let idx = |r: usize, c: usize| r * cols + c;
        let mut out = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                match self.orientation {
                    Orientation::Horizontal => {
                        if c + 1 < cols && c % 2 == self.offset && r % 2 == self.stagger {
                            out.push((idx(r, c), idx(r, c + 1)));
                        }
                    }
                    Orientation::Vertical => {
                        if r + 1 < rows && r % 2 == self.offset && c % 2 == self.stagger {
                            out.push((idx(r, c), idx(r + 1, c)));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrcsSpec {
    rows: usize,
    cols: usize,
    depth: usize,
    seed: u64,
}

impl GrcsSpec {
    pub fn new(rows: usize, cols: usize, depth: usize, seed: u64) -> Result<GrcsSpec, BenchgenError> {
        if rows == 0 || cols == 0 {
            return Err(BenchgenError::EmptyLattice { rows, cols });
        }
        if depth == 0 {
            return Err(BenchgenError::ZeroDepth);
        }
        Ok(GrcsSpec {
            rows,
            cols,
            depth,
            seed,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols
    }
}

const GRCS_SINGLE: [Gate; 3] = [Gate::Sx, Gate::Sy, Gate::T];

/// Hadamard on every qubit, then `depth` cycles of one CZ layer plus a random
/// single-qubit gate from `{sx, sy, t}` on every qubit the CZ layer leaves
/// idle, then measure all. A qubit never gets the same single-qubit gate
/// twice in a row.
pub fn gen_grcs(spec: &GrcsSpec) -> Circuit {
    let n = spec.num_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut instrs: Vec<Instruction> = (0..n).map(|q| Instruction::gate(Gate::H, &[q])).collect();
    let mut last: Vec<Option<usize>> = vec![None; n];

    for cycle in 0..spec.depth {
        let pattern = CZ_SCHEDULE[cycle % CZ_SCHEDULE.len()];
        let mut busy = vec![false; n];
        for (a, b) in pattern.edges(spec.rows, spec.cols) {
            busy[a] = true;
            busy[b] = true;
            instrs.push(Instruction::gate(Gate::Cz, &[a, b]));
        }
        for q in (0..n).filter(|&q| !busy[q]) {
            let options: Vec<usize> = (0..GRCS_SINGLE.len()).filter(|&g| Some(g) != last[q]).collect();
            let g = options[rng.random_range(0..options.len())];
            last[q] = Some(g);
            instrs.push(Instruction::gate(GRCS_SINGLE[g], &[q]));
        }
    }
    instrs.extend((0..n).map(|q| Instruction::measure(q, q)));
    Circuit::new(n, n, instrs).expect("generated circuit is well formed")
}

/// Simple undirected 3-regular graph. Edges are stored as `(a, b)` with
/// `a < b`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U3RGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl U3RGraph {
    /// Checks degree-3 and simplicity; edges are normalized and sorted.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<U3RGraph, BenchgenError> {
        if n < 4 || n % 2 == 1 {
            return Err(BenchgenError::BadVertexCount(n));
        }
        let invalid = |message: String| BenchgenError::EdgeList { line: 0, message };
        let mut set = BTreeSet::new();
        let mut degree = vec![0usize; n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(invalid(format!("vertex out of range in edge ({a}, {b})")));
            }
            if a == b {
                return Err(invalid(format!("self-loop at {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(invalid(format!("parallel edge ({a}, {b})")));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d != 3) {
            return Err(invalid(format!("vertex {v} has degree {}", degree[v])));
        }
        Ok(U3RGraph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Header line `n m`, then one `a b` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<U3RGraph, BenchgenError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let pair = |line: usize, l: &str| -> Result<(usize, usize), BenchgenError> {
            let nums: Vec<&str> = l.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| BenchgenError::EdgeList {
                    line,
                    message: format!("expected an integer, found `{s}`"),
                })
            };
            match nums.as_slice() {
                [a, b] => Ok((parse(a)?, parse(b)?)),
                _ => Err(BenchgenError::EdgeList {
                    line,
                    message: "expected two integers".into(),
                }),
            }
        };
        let (line, header) = lines.next().ok_or(BenchgenError::EdgeList {
            line: 1,
            message: "missing header".into(),
        })?;
        let (n, m) = pair(line, header)?;
        let edges = lines.map(|(i, l)| pair(i, l)).collect::<Result<Vec<_>, _>>()?;
        if edges.len() != m {
            return Err(BenchgenError::EdgeList {
                line,
                message: format!("header promises {m} edges, found {}", edges.len()),
            });
        }
        U3RGraph::new(n, edges)
    }
}

/// Random 3-regular graph by the configuration model: `3n` stubs are
/// shuffled and paired, and the whole pairing is redrawn until it has no
/// self-loops or parallel edges.
pub fn gen_u3r(n: usize, seed: u64) -> Result<U3RGraph, BenchgenError> {
    if n < 4 || n % 2 == 1 {
        return Err(BenchgenError::BadVertexCount(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    'draw: loop {
        stubs.shuffle(&mut rng);
        let mut set = BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !set.insert((a, b)) {
                continue 'draw;
            }
        }
        return Ok(U3RGraph {
            n,
            edges: set.into_iter().collect(),
        });
    }
}

pub const DEFAULT_GAMMA: f64 = 0.7;
pub const DEFAULT_BETA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaSpec {
    graph: U3RGraph,
    gammas: Vec<f64>,
    betas: Vec<f64>,
    seed: u64,
}

impl QaoaSpec {
    /// `p` layers with the default angles.
    pub fn new(graph: U3RGraph, p: usize, seed: u64) -> QaoaSpec {
        QaoaSpec {
            graph,
            gammas: vec![DEFAULT_GAMMA; p],
            betas: vec![DEFAULT_BETA; p],
            seed,
        }
    }

    pub fn with_angles(
        graph: U3RGraph,
        gammas: Vec<f64>,
        betas: Vec<f64>,
        seed: u64,
    ) -> Result<QaoaSpec, BenchgenError> {
        if gammas.len() != betas.len() {
            return Err(BenchgenError::AngleCount {
                p: gammas.len(),
                betas: betas.len(),
                gammas: gammas.len(),
            });
        }
        Ok(QaoaSpec {
            graph,
            gammas,
            betas,
            seed,
        })
    }

    /// Random graph on `n` vertices drawn with `seed`, default angles.
    pub fn random(n: usize, p: usize, seed: u64) -> Result<QaoaSpec, BenchgenError> {
        Ok(QaoaSpec::new(gen_u3r(n, seed)?, p, seed))
    }

    pub fn graph(&self) -> &U3RGraph {
        &self.graph
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Hadamard on all qubits; per layer, `cx(i,j) rz(2γ) j cx(i,j)` for every
/// edge in sorted order followed by `rx(2β)` on all qubits; measure all.
pub fn gen_qaoa(spec: &QaoaSpec) -> Circuit {
    let n = spec.graph.n;
    let mut instrs: Vec<Instruction> = (0..n).map(|q| Instruction::gate(Gate::H, &[q])).collect();
    for (gamma, beta) in spec.gammas.iter().zip(&spec.betas) {
        for &(i, j) in &spec.graph.edges {
            instrs.push(Instruction::gate(Gate::Cx, &[i, j]));
            instrs.push(Instruction::gate(Gate::Rz(2.0 * gamma), &[j]));
            instrs.push(Instruction::gate(Gate::Cx, &[i, j]));
        }
        instrs.extend((0..n).map(|q| Instruction::gate(Gate::Rx(2.0 * beta), &[q])));
    }
    instrs.extend((0..n).map(|q| Instruction::measure(q, q)));
    Circuit::new(n, n, instrs).expect("generated circuit is well formed")
}

/// `num_gates` gates drawn uniformly from the supported set (two-qubit gates
/// about half the time when `num_qubits > 1`), then measure all. Rotation
/// angles are uniform in `[-π, π)`.
pub fn random_circuit(num_qubits: usize, num_gates: usize, seed: u64) -> Circuit {
    const SINGLE: [Gate; 8] = [
        Gate::H,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::S,
        Gate::T,
        Gate::Sx,
        Gate::Sy,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instrs = Vec::with_capacity(num_gates + num_qubits);
    for _ in 0..num_gates {
        if num_qubits == 0 {
            break;
        }
        if num_qubits > 1 && rng.random_bool(0.5) {
            let a = rng.random_range(0..num_qubits);
            let mut b = rng.random_range(0..num_qubits - 1);
            if b >= a {
                b += 1;
            }
            let gate = if rng.random_bool(0.5) { Gate::Cx } else { Gate::Cz };
            instrs.push(Instruction::gate(gate, &[a, b]));
        } else {
            let q = rng.random_range(0..num_qubits);
            let k = rng.random_range(0..SINGLE.len() + 2);
            let gate = match k.checked_sub(SINGLE.len()) {
                None => SINGLE[k],
                Some(r) => {
                    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                    if r == 0 {
                        Gate::Rx(theta)
                    } else {
                        Gate::Rz(theta)
                    }
                }
            };
            instrs.push(Instruction::gate(gate, &[q]));
        }
    }
    instrs.extend((0..num_qubits).map(|q| Instruction::measure(q, q)));
    Circuit::new(num_qubits, num_qubits, instrs).expect("generated circuit is well formed")
}
