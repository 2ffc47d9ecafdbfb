use super::{Circuit, CircuitError, Instruction, QubitId};

pub type NodeId = usize;

/// A vertex of the circuit DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    /// Start of a qubit's wire.
    Root(QubitId),
    /// Gate at the given instruction index.
    Op(usize),
    /// End of a qubit's wire; absorbs the qubit's final measurement.
    Terminal(QubitId),
}

/// Causal dependency graph of a static circuit.
///
/// Node ids are laid out as roots `0..n`, then one op per gate (or leading
/// reset) in instruction order, then terminals. This layout is itself a
/// topological order. Every edge carries the qubit whose wire it follows;
/// two consecutive gates on the same pair of qubits give two parallel edges.
#[derive(Debug, Clone)]
pub struct CircuitDag {
    num_qubits: usize,
    nodes: Vec<Node>,
    succ: Vec<Vec<(NodeId, QubitId)>>,
    pred: Vec<Vec<(NodeId, QubitId)>>,
}

impl CircuitDag {
    /// Builds the DAG of a static circuit. Barriers contribute nothing;
    /// measurements are folded into the terminals.
    pub fn build(circuit: &Circuit) -> Result<CircuitDag, CircuitError> {
        if !circuit.is_static() {
            return Err(CircuitError::NotStatic);
        }
        let n = circuit.num_qubits();
        let mut nodes: Vec<Node> = (0..n).map(|q| Node::Root(QubitId(q))).collect();
        let mut edges: Vec<(NodeId, NodeId, QubitId)> = Vec::new();
        // last vertex written on each wire
        let mut last: Vec<NodeId> = (0..n).collect();

        for (idx, inst) in circuit.instructions().iter().enumerate() {
            let qubits = match inst {
                Instruction::Gate { qubits, .. } => qubits.as_slice(),
                Instruction::Reset { qubit } => std::slice::from_ref(qubit),
                Instruction::Measure { .. } | Instruction::Barrier { .. } => continue,
            };
            let id = nodes.len();
            nodes.push(Node::Op(idx));
            for &q in qubits {
                edges.push((last[q.0], id, q));
                last[q.0] = id;
            }
        }
        for (q, &prev) in last.iter().enumerate() {
            let id = nodes.len();
            nodes.push(Node::Terminal(QubitId(q)));
            edges.push((prev, id, QubitId(q)));
        }

        let mut dag = CircuitDag {
            num_qubits: n,
            succ: vec![Vec::new(); nodes.len()],
            pred: vec![Vec::new(); nodes.len()],
            nodes,
        };
        for (from, to, q) in edges {
            dag.add_edge(from, to, q);
        }
        Ok(dag)
    }

    pub(crate) fn add_edge(&mut self, from: NodeId, to: NodeId, qubit: QubitId) {
        self.succ[from].push((to, qubit));
        self.pred[to].push((from, qubit));
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self, q: QubitId) -> NodeId {
        q.0
    }

    pub fn terminal(&self, q: QubitId) -> NodeId {
        self.nodes.len() - self.num_qubits + q.0
    }

    pub fn successors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.succ[id].iter().map(|&(to, _)| to)
    }

    pub fn predecessors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.pred[id].iter().map(|&(from, _)| from)
    }

    pub fn in_degree(&self, id: NodeId) -> usize {
        self.pred[id].len()
    }

    pub fn out_degree(&self, id: NodeId) -> usize {
        self.succ[id].len()
    }

    /// All edges as `(from, to, wire)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, QubitId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(from, out)| out.iter().map(move |&(to, q)| (from, to, q)))
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm. `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: Vec<NodeId> = (0..self.nodes.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop() {
            order.push(v);
            for &(w, _) in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

/// Builds the DAG of `circuit`; see [`CircuitDag::build`].
pub fn build_dag(circuit: &Circuit) -> Result<CircuitDag, CircuitError> {
    CircuitDag::build(circuit)
}
