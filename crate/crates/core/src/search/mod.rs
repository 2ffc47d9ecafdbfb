//! Randomized greedy search for qubit reuse sequences.
//!
//! The search repeatedly picks a random qubit that still has candidate
//! edges and grows a reuse sequence from it. At every step the next qubit is
//! chosen among the current potential set by three criteria, in order:
//!
//! 1. the size of its *common neighbors* set, i.e. the qubits that could
//!    still follow every member of the sequence once it is appended;
//! 2. its *reuse score*, the total overlap of its common neighbors with
//!    those of the other maximal candidates;
//! 3. a uniformly random pick among whatever ties remain.
//!
//! After a sequence is complete its edges are committed to the candidate
//! matrix with [`update_cmatrix`], which removes every edge that would now
//! close a cycle. Sequences found in one pass are chained together by
//! [`merge_subsets`], completed with singletons by [`finalize_reuse`], and
//! the narrowest result over all passes wins.

mod choice;

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use choice::{Chooser, LowestIndex, RandomChooser};

use crate::circuit::{Circuit, CircuitDag, CircuitError, QubitId};
use crate::matrices::{
    available_qubits, update_cmatrix, CandidateMatrix, MatrixError, QubitSet, ReuseMatrices,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("qubit {0} has two different successors")]
    ConflictingSuccessor(usize),
    #[error("qubit {0} has two different predecessors")]
    ConflictingPredecessor(usize),
    #[error("reuse edges form a cycle through qubit {0}")]
    Cycle(usize),
    #[error("qubit {0} appears in more than one sequence")]
    DuplicateQubit(usize),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Ordered logical qubits sharing one wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReuseSequence(Vec<QubitId>);

impl ReuseSequence {
    pub fn new(qubits: Vec<QubitId>) -> ReuseSequence {
        ReuseSequence(qubits)
    }

    pub fn from_indices(indices: &[usize]) -> ReuseSequence {
        ReuseSequence(indices.iter().copied().map(QubitId).collect())
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.0
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|q| q.0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<QubitId> {
        self.0.first().copied()
    }

    /// Consecutive `(terminal, root)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (QubitId, QubitId)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }
}

impl fmt::Display for ReuseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("]")
    }
}

/// A partition of the logical qubits into reuse sequences. Its width is the
/// number of wires the dynamic circuit needs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReuseSolution {
    sequences: Vec<ReuseSequence>,
}

impl ReuseSolution {
    pub fn new(sequences: Vec<ReuseSequence>) -> ReuseSolution {
        ReuseSolution { sequences }
    }

    pub fn all_singletons(n: usize) -> ReuseSolution {
        ReuseSolution {
            sequences: (0..n).map(|q| ReuseSequence(vec![QubitId(q)])).collect(),
        }
    }

    pub fn sequences(&self) -> &[ReuseSequence] {
        &self.sequences
    }

    pub fn width(&self) -> usize {
        self.sequences.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.sequences.iter().map(ReuseSequence::len).sum()
    }
}

impl fmt::Display for ReuseSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.sequences.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Number of search passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    Fixed(usize),
    /// `max(1, ⌈log2 n⌉)`.
    Auto,
}

impl Iterations {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Iterations::Fixed(i) => i.max(1),
            Iterations::Auto => ceil_log2(n).max(1),
        }
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

impl std::str::FromStr for Iterations {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Iterations::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive integer or `auto`, found `{s}`")),
            Ok(i) => Ok(Iterations::Fixed(i)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Random,
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub iterations: Iterations,
    pub seed: u64,
    pub tie_break: TieBreak,
    /// Worker threads for independent passes; 1 runs them inline.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            iterations: Iterations::Auto,
            seed: 0,
            tie_break: TieBreak::Random,
            threads: 1,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> SearchConfig {
        SearchConfig {
            seed,
            ..SearchConfig::default()
        }
    }

    pub fn iterations(mut self, iterations: Iterations) -> SearchConfig {
        self.iterations = iterations;
        self
    }

    fn chooser(&self, pass: usize) -> Box<dyn Chooser> {
        match self.tie_break {
            TieBreak::Random => Box::new(RandomChooser::for_stream(self.seed, pass as u64)),
            TieBreak::LowestIndex => Box::new(LowestIndex),
        }
    }
}

/// Qubits that may directly follow `q` on its wire.
pub fn potential_reuse(c: &CandidateMatrix, q: QubitId) -> QubitSet {
    c.bits().row(q.0)
}

/// Qubits that may follow every member of `sequence` and `candidate`.
pub fn common_neighbors(c: &CandidateMatrix, sequence: &[QubitId], candidate: QubitId) -> QubitSet {
    let mut acc = potential_reuse(c, candidate);
    for &q in sequence {
        acc.intersect_words(c.row_words(q));
    }
    acc
}

/// Common-neighbor sets of every qubit in a potential set.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    potential: QubitSet,
    entries: Vec<(QubitId, QubitSet)>,
}

impl NeighborTable {
    /// `potential` must already be the intersection of the potential sets of
    /// the sequence built so far; each entry is then that set restricted to
    /// the candidate's own row.
    pub fn build(c: &CandidateMatrix, potential: &QubitSet) -> NeighborTable {
        let entries = potential
            .iter()
            .map(|q| {
                let mut n = potential.clone();
                n.intersect_words(c.row_words(q));
                (q, n)
            })
            .collect();
        NeighborTable {
            potential: potential.clone(),
            entries,
        }
    }

    pub fn potential(&self) -> &QubitSet {
        &self.potential
    }

    pub fn neighbors(&self, q: QubitId) -> Option<&QubitSet> {
        self.entries.iter().find(|(k, _)| *k == q).map(|(_, n)| n)
    }

    pub fn all_empty(&self) -> bool {
        self.entries.iter().all(|(_, n)| n.is_empty())
    }

    /// Candidates whose common-neighbor set has maximal size.
    pub fn max_set(&self) -> Vec<QubitId> {
        let best = self.entries.iter().map(|(_, n)| n.len()).max().unwrap_or(0);
        self.entries
            .iter()
            .filter(|(_, n)| n.len() == best)
            .map(|(q, _)| *q)
            .collect()
    }

    /// Sum of `|N_q ∩ N_k|` over the other members `k` of the maximal set.
    /// Zero when `q` is not in the maximal set.
    pub fn reuse_score(&self, q: QubitId) -> usize {
        let max = self.max_set();
        if !max.contains(&q) {
            return 0;
        }
        let own = self.neighbors(q).expect("q is in the table");
        max.iter()
            .filter(|&&k| k != q)
            .map(|&k| own.intersection_len(self.neighbors(k).expect("k is in the table")))
            .sum()
    }
}

/// Grows the reuse sequence starting at `start` and commits its edges to
/// `c`.
pub fn best_reuse_sequence(
    c: &mut CandidateMatrix,
    start: QubitId,
    chooser: &mut dyn Chooser,
) -> Result<ReuseSequence, SearchError> {
    let mut sequence = vec![start];
    let mut potential = potential_reuse(c, start);
    while !potential.is_empty() {
        let table = NeighborTable::build(c, &potential);
        if table.all_empty() {
            let options = potential.to_vec();
            sequence.push(options[chooser.choose(options.len())]);
            break;
        }
        let max = table.max_set();
        let scores: Vec<usize> = max.iter().map(|&q| table.reuse_score(q)).collect();
        let top = scores.iter().copied().max().unwrap_or(0);
        let ties: Vec<QubitId> = max
            .iter()
            .zip(&scores)
            .filter(|(_, &s)| s == top)
            .map(|(&q, _)| q)
            .collect();
        let next = ties[chooser.choose(ties.len())];
        sequence.push(next);
        potential = table.neighbors(next).expect("next is in the table").clone();
    }
    for w in sequence.windows(2) {
        update_cmatrix(c, w[0], w[1])?;
    }
    Ok(ReuseSequence(sequence))
}

/// Chains sequences that share endpoints into maximal sequences.
///
/// Each qubit may have at most one successor and one predecessor across all
/// inputs. Output chains are ordered by where their head first appears in
/// the input.
pub fn merge_subsets(sequences: &[ReuseSequence]) -> Result<Vec<ReuseSequence>, SearchError> {
    let mut succ: HashMap<QubitId, QubitId> = HashMap::new();
    let mut pred: HashMap<QubitId, QubitId> = HashMap::new();
    let mut order: Vec<QubitId> = Vec::new();
    let mut seen: HashSet<QubitId> = HashSet::new();
    for s in sequences {
        for &q in s.qubits() {
            if seen.insert(q) {
                order.push(q);
            }
        }
        for (a, b) in s.edges() {
            if let Some(&prev) = succ.get(&a) {
                if prev != b {
                    return Err(SearchError::ConflictingSuccessor(a.0));
                }
            }
            if let Some(&prev) = pred.get(&b) {
                if prev != a {
                    return Err(SearchError::ConflictingPredecessor(b.0));
                }
            }
            succ.insert(a, b);
            pred.insert(b, a);
        }
    }

    let mut emitted = 0usize;
    let mut out = Vec::new();
    for &head in &order {
        if pred.contains_key(&head) {
            continue;
        }
        let mut chain = vec![head];
        let mut cur = head;
        while let Some(&next) = succ.get(&cur) {
            chain.push(next);
            cur = next;
        }
        emitted += chain.len();
        out.push(ReuseSequence(chain));
    }
    if emitted != order.len() {
        let placed: HashSet<QubitId> = out.iter().flat_map(|s| s.qubits().iter().copied()).collect();
        let stuck = order
            .iter()
            .find(|q| !placed.contains(q))
            .expect("some qubit was not emitted");
        return Err(SearchError::Cycle(stuck.0));
    }
    Ok(out)
}

/// Appends a singleton for every qubit in `0..n` not covered by `sequences`.
pub fn finalize_reuse(sequences: Vec<ReuseSequence>, n: usize) -> Result<ReuseSolution, SearchError> {
    let mut seen = vec![false; n];
    for s in &sequences {
        for q in s.qubits() {
            if q.0 >= n {
                return Err(SearchError::QubitOutOfRange { qubit: q.0, n });
            }
            if std::mem::replace(&mut seen[q.0], true) {
                return Err(SearchError::DuplicateQubit(q.0));
            }
        }
    }
    let mut sequences = sequences;
    sequences.extend(
        (0..n)
            .filter(|&q| !seen[q])
            .map(|q| ReuseSequence(vec![QubitId(q)])),
    );
    Ok(ReuseSolution { sequences })
}

/// One pass over a private copy of the candidate matrix.
pub fn search_pass(
    candidate: &CandidateMatrix,
    chooser: &mut dyn Chooser,
) -> Result<ReuseSolution, SearchError> {
    let mut c = candidate.clone();
    let mut found = Vec::new();
    while !c.is_zero() {
        let available = available_qubits(&c);
        let start = available[chooser.choose(available.len())];
        let seq = best_reuse_sequence(&mut c, start, chooser)?;
        if seq.len() > 1 {
            found.push(seq);
        }
    }
    let merged = merge_subsets(&found)?;
    finalize_reuse(merged, candidate.n())
}

/// Runs the full search on a candidate matrix.
///
/// An all-zero matrix returns the all-singletons solution. Otherwise every
/// pass draws from its own random stream derived from `(seed, pass index)`,
/// and the narrowest solution wins, the lowest pass index breaking ties.
pub fn search(candidate: &CandidateMatrix, config: &SearchConfig) -> Result<ReuseSolution, SearchError> {
    let n = candidate.n();
    if candidate.is_zero() {
        return Ok(ReuseSolution::all_singletons(n));
    }
    let passes = config.iterations.resolve(n);

    if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
        let results: Vec<Result<ReuseSolution, SearchError>> = pool.install(|| {
            (0..passes)
                .into_par_iter()
                .map(|pass| search_pass(candidate, config.chooser(pass).as_mut()))
                .collect()
        });
        let mut best: Option<ReuseSolution> = None;
        for r in results {
            let sol = r?;
            if best.as_ref().is_none_or(|b| sol.width() < b.width()) {
                best = Some(sol);
            }
        }
        return Ok(best.expect("at least one pass"));
    }

    let mut best: Option<ReuseSolution> = None;
    for pass in 0..passes {
        let sol = search_pass(candidate, config.chooser(pass).as_mut())?;
        if best.as_ref().is_none_or(|b| sol.width() < b.width()) {
            best = Some(sol);
        }
        if best.as_ref().is_some_and(|b| b.width() <= 1) {
            break;
        }
    }
    Ok(best.expect("at least one pass"))
}

/// Finds a narrow reuse solution for a static circuit.
pub fn gidnet(circuit: &Circuit, config: &SearchConfig) -> Result<ReuseSolution, SearchError> {
    let dag = CircuitDag::build(circuit)?;
    let matrices = ReuseMatrices::of(&dag);
    search(&matrices.candidate, config)
}

/// JSON form of a solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub width: usize,
    pub sequences: Vec<Vec<usize>>,
    pub iterations: usize,
    pub seed: u64,
}

impl SolutionReport {
    pub fn new(solution: &ReuseSolution, iterations: usize, seed: u64) -> SolutionReport {
        SolutionReport {
            width: solution.width(),
            sequences: solution.sequences().iter().map(ReuseSequence::indices).collect(),
            iterations,
            seed,
        }
    }

    pub fn solution(&self) -> ReuseSolution {
        ReuseSolution::new(
            self.sequences
                .iter()
                .map(|s| ReuseSequence::from_indices(s))
                .collect(),
        )
    }
}
