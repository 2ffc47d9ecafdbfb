//! Reachability matrices of a circuit DAG.
//!
//! The *biadjacency matrix* `B` records which terminals each root reaches:
//! `B[r_i][t_j]` is set iff the DAG has a path from the root of qubit `i` to
//! the terminal of qubit `j`. Such a path forbids placing `i` after `j` on a
//! shared wire. The *candidate matrix* `C = 1 - Bᵀ` is its complement
//! transposed: `C[t_i][r_j]` is set iff qubit `j` may start on the wire that
//! qubit `i` just finished with.

mod bits;

use std::fmt::Write as _;

use thiserror::Error;

pub use bits::{BitMatrix, QubitSet};

use crate::circuit::{CircuitDag, Node, QubitId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("edge (t{terminal}, r{root}) is not present in the candidate matrix")]
    IllegalEdge { terminal: usize, root: usize },
}

/// `B[r_i][t_j]`: rows are roots, columns are terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiadjacencyMatrix(BitMatrix);

impl BiadjacencyMatrix {
    pub fn from_bits(bits: BitMatrix) -> BiadjacencyMatrix {
        assert_eq!(bits.rows(), bits.cols(), "biadjacency matrix must be square");
        BiadjacencyMatrix(bits)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    /// Does the root of `root` reach the terminal of `terminal`?
    pub fn reaches(&self, root: QubitId, terminal: QubitId) -> bool {
        self.0.get(root.0, terminal.0)
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.0
    }
}

/// `C[t_i][r_j]`: rows are terminals, columns are roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateMatrix(BitMatrix);

impl CandidateMatrix {
    pub fn from_bits(bits: BitMatrix) -> CandidateMatrix {
        assert_eq!(bits.rows(), bits.cols(), "candidate matrix must be square");
        CandidateMatrix(bits)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    /// May `root` start on the wire freed by measuring `terminal`?
    #[inline]
    pub fn allows(&self, terminal: QubitId, root: QubitId) -> bool {
        self.0.get(terminal.0, root.0)
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn edge_count(&self) -> usize {
        self.0.count_ones()
    }

    pub(crate) fn row_words(&self, terminal: QubitId) -> &[u64] {
        self.0.row_words(terminal.0)
    }
}

/// Computes `B` by propagating terminal bitsets backwards through the DAG.
pub fn biadjacency(dag: &CircuitDag) -> BiadjacencyMatrix {
    let n = dag.num_qubits();
    let order = dag
        .topological_order()
        .expect("circuit DAG must be acyclic");
    let mut reach = vec![QubitSet::new(n); dag.num_nodes()];
    for &v in order.iter().rev() {
        if let Node::Terminal(q) = dag.node(v) {
            reach[v].insert(q);
            continue;
        }
        let mut acc = QubitSet::new(n);
        for w in dag.successors(v) {
            for q in reach[w].iter() {
                acc.insert(q);
            }
        }
        reach[v] = acc;
    }
    let mut b = BitMatrix::zeros(n, n);
    for i in 0..n {
        for q in reach[dag.root(QubitId(i))].iter() {
            b.set(i, q.0, true);
        }
    }
    BiadjacencyMatrix(b)
}

/// `C = 1 - Bᵀ`.
pub fn candidate_from_biadjacency(b: &BiadjacencyMatrix) -> CandidateMatrix {
    CandidateMatrix(b.0.transpose().complement())
}

/// Removes candidate edges made illegal by selecting the reuse edge
/// `terminal → root`.
///
/// With `V_r` the roots that `terminal`'s row rejects and `V_t` the
/// terminals that `root`'s column rejects (both taken before any change),
/// every entry of `V_t × V_r` is cleared, then the whole row of `terminal`
/// and the whole column of `root`.
pub fn update_cmatrix(
    c: &mut CandidateMatrix,
    terminal: QubitId,
    root: QubitId,
) -> Result<(), MatrixError> {
    if !c.allows(terminal, root) {
        return Err(MatrixError::IllegalEdge {
            terminal: terminal.0,
            root: root.0,
        });
    }
    let n = c.n();
    let m = &mut c.0;
    // Clearing `V_r` bits of row k is the same as AND-ing with row `terminal`.
    let keep = m.row_words(terminal.0).to_vec();
    let vr_mask: Vec<u64> = keep.iter().map(|w| !w).collect();
    let vt: Vec<usize> = (0..n).filter(|&k| !m.get(k, root.0)).collect();
    for k in vt {
        m.clear_row_bits(k, &vr_mask);
    }
    m.clear_row(terminal.0);
    m.clear_col(root.0);
    Ok(())
}

/// Number of candidate edges leaving each terminal.
pub fn row_sums(c: &CandidateMatrix) -> Vec<usize> {
    (0..c.n()).map(|i| c.0.row_count(i)).collect()
}

/// Qubits whose terminal still has at least one candidate edge.
pub fn available_qubits(c: &CandidateMatrix) -> Vec<QubitId> {
    (0..c.n())
        .filter(|&i| !c.0.row_is_zero(i))
        .map(QubitId)
        .collect()
}

/// Both matrices of a DAG.
#[derive(Debug, Clone)]
pub struct ReuseMatrices {
    pub biadjacency: BiadjacencyMatrix,
    pub candidate: CandidateMatrix,
}

impl ReuseMatrices {
    pub fn of(dag: &CircuitDag) -> ReuseMatrices {
        let biadjacency = biadjacency(dag);
        let candidate = candidate_from_biadjacency(&biadjacency);
        ReuseMatrices {
            biadjacency,
            candidate,
        }
    }

    /// Text dump: `B` with root rows and terminal columns, then `C` with
    /// terminal rows and root columns, one `0`/`1` string per row.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let n = self.biadjacency.n();
        out.push_str("B rows=roots cols=terminals\n");
        for (i, row) in self.biadjacency.0.to_rows_string().into_iter().enumerate() {
            let _ = writeln!(out, "r{i:<w$} {row}", w = width(n));
        }
        out.push_str("C rows=terminals cols=roots\n");
        for (i, row) in self.candidate.0.to_rows_string().into_iter().enumerate() {
            let _ = writeln!(out, "t{i:<w$} {row}", w = width(n));
        }
        out
    }
}

fn width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len()
}
