//! DAG, instance and augmented-graph representations.
//!
//! Nodes of the input DAG are labelled `1..=n`. The augmented graph adds a
//! virtual source `0` and a virtual sink `n + 1`; its arc index space is
//! laid out as original arcs (instance order), then source arcs `(0, i)` by
//! head, then sink arcs `(i, n + 1)` by tail.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::GraphError;

pub type Node = usize;

/// Directed acyclic graph on nodes `1..=n`.
#[derive(Debug, Clone)]
pub struct Dag {
    n: usize,
    arcs: Vec<(Node, Node)>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    topo: Vec<Node>,
    // reach[i][j] <=> a (possibly empty) path from i to j exists.
    reach: Vec<FixedBitSet>,
    lookup: HashMap<(Node, Node), usize>,
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.arcs == other.arcs
    }
}

impl Eq for Dag {}

impl Dag {
    pub fn new(n: usize, arcs: Vec<(Node, Node)>) -> Result<Self, GraphError> {
        let mut lookup = HashMap::with_capacity(arcs.len());
        let mut out_arcs = vec![Vec::new(); n + 1];
        let mut in_arcs = vec![Vec::new(); n + 1];
        for (idx, &(u, v)) in arcs.iter().enumerate() {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(GraphError::NodeOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if lookup.insert((u, v), idx).is_some() {
                return Err(GraphError::DuplicateArc(u, v));
            }
            out_arcs[u].push(idx);
            in_arcs[v].push(idx);
        }

        // Kahn's algorithm, smallest label first so the order is canonical.
        let mut indeg: Vec<usize> = (0..=n).map(|v| in_arcs[v].len()).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<Node>> = (1..=n)
            .filter(|&v| indeg[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(u)) = ready.pop() {
            topo.push(u);
            for &a in &out_arcs[u] {
                let v = arcs[a].1;
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(std::cmp::Reverse(v));
                }
            }
        }
        if topo.len() != n {
            return Err(GraphError::Cycle);
        }

        let mut reach = vec![FixedBitSet::with_capacity(n + 1); n + 1];
        for &u in topo.iter().rev() {
            let mut row = FixedBitSet::with_capacity(n + 1);
            row.insert(u);
            for &a in &out_arcs[u] {
                row.union_with(&reach[arcs[a].1]);
            }
            reach[u] = row;
        }

        Ok(Dag {
            n,
            arcs,
            out_arcs,
            in_arcs,
            topo,
            reach,
            lookup,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(Node, Node)] {
        &self.arcs
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn out_arcs(&self, u: Node) -> &[usize] {
        &self.out_arcs[u]
    }

    pub fn in_arcs(&self, v: Node) -> &[usize] {
        &self.in_arcs[v]
    }

    /// Topological order of `1..=n` (ties broken toward the smaller label).
    pub fn topo_order(&self) -> &[Node] {
        &self.topo
    }

    pub fn arc_index(&self, u: Node, v: Node) -> Option<usize> {
        self.lookup.get(&(u, v)).copied()
    }

    /// Reflexive reachability: `reaches(i, i)` is always true.
    pub fn reaches(&self, i: Node, j: Node) -> bool {
        i == j || self.reach[i].contains(j)
    }

    /// Set of nodes reachable from `i` (including `i`).
    pub fn descendants(&self, i: Node) -> &FixedBitSet {
        &self.reach[i]
    }

    /// Same nodes, every arc reversed; arc indices are preserved.
    pub fn reversed(&self) -> Dag {
        Dag::new(self.n, self.arcs.iter().map(|&(u, v)| (v, u)).collect())
            .expect("reversal of a DAG is a DAG")
    }
}

/// A DAG together with its mandatory arc subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    dag: Dag,
    mandatory: FixedBitSet,
}

impl Instance {
    pub fn new(dag: Dag, mandatory: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut set = FixedBitSet::with_capacity(dag.num_arcs());
        for a in mandatory {
            if a >= dag.num_arcs() {
                return Err(GraphError::MandatoryIndexOutOfRange(a));
            }
            set.insert(a);
        }
        Ok(Instance {
            dag,
            mandatory: set,
        })
    }

    /// Builds an instance from arc pairs; mandatory arcs are given as pairs too.
    pub fn from_pairs(
        n: usize,
        arcs: Vec<(Node, Node)>,
        mandatory: &[(Node, Node)],
    ) -> Result<Self, GraphError> {
        let dag = Dag::new(n, arcs)?;
        let idx = mandatory
            .iter()
            .map(|&(u, v)| {
                dag.arc_index(u, v)
                    .ok_or(GraphError::MandatoryNotInArcs(u, v))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(dag, idx)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn n(&self) -> usize {
        self.dag.n()
    }

    pub fn is_mandatory(&self, arc: usize) -> bool {
        self.mandatory.contains(arc)
    }

    pub fn mandatory_arcs(&self) -> impl Iterator<Item = usize> + '_ {
        self.mandatory.ones()
    }

    pub fn num_mandatory(&self) -> usize {
        self.mandatory.count_ones(..)
    }

    pub fn is_mandatory_pair(&self, u: Node, v: Node) -> bool {
        self.dag
            .arc_index(u, v)
            .is_some_and(|a| self.is_mandatory(a))
    }

    /// Every arc reversed; mandatory membership follows the arcs.
    pub fn reversed(&self) -> Instance {
        Instance {
            dag: self.dag.reversed(),
            mandatory: self.mandatory.clone(),
        }
    }
}

/// A path inside `G` (nodes of `V` only). Validity against a particular
/// graph is checked by the functions that consume it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub nodes: Vec<Node>,
}

impl Path {
    pub fn new(nodes: Vec<Node>) -> Self {
        Path { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The corresponding `0 -> ... -> n+1` path of the augmented graph.
    pub fn to_augmented(&self, n: usize) -> Vec<Node> {
        let mut v = Vec::with_capacity(self.nodes.len() + 2);
        v.push(0);
        v.extend_from_slice(&self.nodes);
        v.push(n + 1);
        v
    }
}

impl From<Vec<Node>> for Path {
    fn from(nodes: Vec<Node>) -> Self {
        Path { nodes }
    }
}

/// True iff consecutive pairs of `p` include a mandatory arc. Errors if `p`
/// is not a path of the instance's DAG.
pub fn is_feasible_path(inst: &Instance, p: &Path) -> Result<bool, GraphError> {
    if p.nodes.is_empty() || p.nodes.iter().any(|&v| v == 0 || v > inst.n()) {
        return Err(GraphError::NotAPath(p.nodes.clone()));
    }
    let mut feasible = false;
    for w in p.nodes.windows(2) {
        let a = inst
            .dag()
            .arc_index(w[0], w[1])
            .ok_or_else(|| GraphError::NotAPath(p.nodes.clone()))?;
        feasible |= inst.is_mandatory(a);
    }
    Ok(feasible)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Original,
    Source,
    Sink,
}

/// `Ḡ`: the DAG plus virtual source `0` and sink `n + 1`.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    inst: Instance,
    arcs: Vec<(Node, Node)>,
    cost: Vec<i64>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    topo: Vec<Node>,
}

pub fn augment(inst: &Instance) -> AugmentedGraph {
    AugmentedGraph::new(inst.clone())
}

impl AugmentedGraph {
    pub fn new(inst: Instance) -> Self {
        let n = inst.n();
        let m = inst.dag().num_arcs();
        let sink = n + 1;
        let mut arcs = Vec::with_capacity(m + 2 * n);
        arcs.extend_from_slice(inst.dag().arcs());
        arcs.extend((1..=n).map(|i| (0, i)));
        arcs.extend((1..=n).map(|i| (i, sink)));

        let nn = n as i64;
        let cost = arcs
            .iter()
            .map(|&(u, _)| if u == 0 { 1 } else { -nn })
            .collect();

        let mut out_arcs = vec![Vec::new(); n + 2];
        let mut in_arcs = vec![Vec::new(); n + 2];
        for (idx, &(u, v)) in arcs.iter().enumerate() {
            out_arcs[u].push(idx);
            in_arcs[v].push(idx);
        }
        let mut topo = Vec::with_capacity(n + 2);
        topo.push(0);
        topo.extend_from_slice(inst.dag().topo_order());
        topo.push(sink);

        AugmentedGraph {
            inst,
            arcs,
            cost,
            out_arcs,
            in_arcs,
            topo,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn sink(&self) -> Node {
        self.inst.n() + 1
    }

    /// `|V̄| = n + 2`.
    pub fn num_nodes(&self) -> usize {
        self.inst.n() + 2
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(Node, Node)] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> (Node, Node) {
        self.arcs[a]
    }

    pub fn cost(&self, a: usize) -> i64 {
        self.cost[a]
    }

    pub fn costs(&self) -> &[i64] {
        &self.cost
    }

    pub fn num_original_arcs(&self) -> usize {
        self.inst.dag().num_arcs()
    }

    pub fn arc_kind(&self, a: usize) -> ArcKind {
        let m = self.num_original_arcs();
        if a < m {
            ArcKind::Original
        } else if a < m + self.n() {
            ArcKind::Source
        } else {
            ArcKind::Sink
        }
    }

    pub fn source_arc(&self, i: Node) -> usize {
        self.num_original_arcs() + i - 1
    }

    pub fn sink_arc(&self, i: Node) -> usize {
        self.num_original_arcs() + self.n() + i - 1
    }

    pub fn is_mandatory(&self, a: usize) -> bool {
        a < self.num_original_arcs() && self.inst.is_mandatory(a)
    }

    pub fn out_arcs(&self, u: Node) -> &[usize] {
        &self.out_arcs[u]
    }

    pub fn in_arcs(&self, v: Node) -> &[usize] {
        &self.in_arcs[v]
    }

    /// Topological order of all of `V̄`: source, the DAG order, sink.
    pub fn topo_order(&self) -> &[Node] {
        &self.topo
    }

    pub fn arc_index(&self, u: Node, v: Node) -> Option<usize> {
        let (n, sink) = (self.n(), self.sink());
        if u == 0 && (1..=n).contains(&v) {
            Some(self.source_arc(v))
        } else if v == sink && (1..=n).contains(&u) {
            Some(self.sink_arc(u))
        } else if (1..=n).contains(&u) && (1..=n).contains(&v) {
            self.inst.dag().arc_index(u, v)
        } else {
            None
        }
    }

    /// Reflexive reachability in `Ḡ`.
    pub fn reaches(&self, i: Node, j: Node) -> bool {
        if i == j {
            return true;
        }
        let sink = self.sink();
        if i == 0 || j == sink {
            return true;
        }
        if i == sink || j == 0 {
            return false;
        }
        self.inst.dag().reaches(i, j)
    }

    /// No path of `Ḡ` visits both `i` and `j` (tested on internal reachability).
    pub fn conflicting(&self, i: Node, j: Node) -> bool {
        let dag = self.inst.dag();
        !dag.reaches(i, j) && !dag.reaches(j, i)
    }
}

pub fn reaches(g: &AugmentedGraph, i: Node, j: Node) -> bool {
    g.reaches(i, j)
}

pub fn conflicting(g: &AugmentedGraph, i: Node, j: Node) -> bool {
    g.conflicting(i, j)
}
