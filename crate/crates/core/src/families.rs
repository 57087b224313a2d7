//! Per-node arc families consumed by the reachability cut classes.
//!
//! For every `i ∈ V` six subsets of `Ā` (bitsets over augmented arc indices):
//!
//! * `mand_in(i)`: mandatory arcs `(u,v)` with a path `v ⇝ i`
//! * `mand_out(i)`: mandatory arcs `(u,v)` with a path `i ⇝ u`
//! * `reach_in(i)`: arcs lying on some feasible path `(0, …, i)`
//! * `reach_out(i)`: arcs lying on some feasible path `(i, …, n̄)`
//! * `partial_in(i)`: arcs of prefixes `(0, …, i)` of feasible `0 ⇝ n̄` paths
//! * `partial_out(i)`: arcs of suffixes `(i, …, n̄)` of feasible `0 ⇝ n̄` paths
//!
//! All reachability tests are reflexive.

use fixedbitset::FixedBitSet;

use crate::graph::{AugmentedGraph, Node};

/// Mandatory-arc positions relative to nodes of `Ḡ`.
#[derive(Debug, Clone)]
pub struct MandatoryReach {
    // after[j]: some mandatory (u,v) has v ⇝ j.
    after: FixedBitSet,
    // before[k]: some mandatory (u,v) has k ⇝ u.
    before: FixedBitSet,
    // between[k] ∋ i: some mandatory (u,v) has k ⇝ u and v ⇝ i.
    between: Vec<FixedBitSet>,
}

impl MandatoryReach {
    pub fn new(g: &AugmentedGraph) -> Self {
        let nodes = g.num_nodes();
        let sink = g.sink();
        let dag = g.instance().dag();
        let descendants = |v: Node| {
            let mut s = FixedBitSet::with_capacity(nodes);
            s.union_with(dag.descendants(v));
            s.grow(nodes);
            s.insert(sink);
            s
        };

        // tails[u]: union of descendants of v over mandatory arcs (u, v).
        let mut tails = vec![FixedBitSet::with_capacity(nodes); nodes];
        let mut after = FixedBitSet::with_capacity(nodes);
        for a in g.instance().mandatory_arcs() {
            let (u, v) = g.arc(a);
            let d = descendants(v);
            after.union_with(&d);
            tails[u].union_with(&d);
        }

        let mut between = vec![FixedBitSet::with_capacity(nodes); nodes];
        for &k in dag.topo_order().iter().rev() {
            let mut row = tails[k].clone();
            for &a in dag.out_arcs(k) {
                row.union_with(&between[dag.arcs()[a].1]);
            }
            between[k] = row;
        }
        let mut from_source = FixedBitSet::with_capacity(nodes);
        for k in 1..=g.n() {
            from_source.union_with(&tails[k]);
        }
        between[0] = from_source;

        let mut before = FixedBitSet::with_capacity(nodes);
        for k in 0..nodes {
            if !between[k].is_clear() {
                before.insert(k);
            }
        }
        MandatoryReach {
            after,
            before,
            between,
        }
    }

    pub fn after(&self, j: Node) -> bool {
        self.after.contains(j)
    }

    pub fn before(&self, k: Node) -> bool {
        self.before.contains(k)
    }

    pub fn between(&self, k: Node, i: Node) -> bool {
        self.between[k].contains(i)
    }
}

#[derive(Debug, Clone)]
pub struct ArcSetFamilies {
    n: usize,
    mand_in: Vec<FixedBitSet>,
    mand_out: Vec<FixedBitSet>,
    reach_in: Vec<FixedBitSet>,
    reach_out: Vec<FixedBitSet>,
    partial_in: Vec<FixedBitSet>,
    partial_out: Vec<FixedBitSet>,
}

pub fn compute_arc_set_families(g: &AugmentedGraph) -> ArcSetFamilies {
    ArcSetFamilies::new(g)
}

impl ArcSetFamilies {
    pub fn new(g: &AugmentedGraph) -> Self {
        let n = g.n();
        let m = g.num_arcs();
        let mr = MandatoryReach::new(g);
        let empty = FixedBitSet::with_capacity(m);
        let mut fam = ArcSetFamilies {
            n,
            mand_in: vec![empty.clone(); n + 2],
            mand_out: vec![empty.clone(); n + 2],
            reach_in: vec![empty.clone(); n + 2],
            reach_out: vec![empty.clone(); n + 2],
            partial_in: vec![empty.clone(); n + 2],
            partial_out: vec![empty; n + 2],
        };

        for i in 1..=n {
            let mut all_in = FixedBitSet::with_capacity(m);
            let mut all_out = FixedBitSet::with_capacity(m);
            for (a, &(j, k)) in g.arcs().iter().enumerate() {
                let mand = g.is_mandatory(a);
                if g.reaches(k, i) {
                    all_in.insert(a);
                    if mand {
                        fam.mand_in[i].insert(a);
                    }
                    if mand || mr.after(j) || mr.between(k, i) {
                        fam.reach_in[i].insert(a);
                    }
                }
                if g.reaches(i, j) {
                    all_out.insert(a);
                    if mand {
                        fam.mand_out[i].insert(a);
                    }
                    if mand || mr.before(k) || mr.between(i, j) {
                        fam.reach_out[i].insert(a);
                    }
                }
            }
            // A prefix of i extends to a feasible path as soon as a mandatory
            // arc is reachable from i, and symmetrically for suffixes.
            fam.partial_in[i] = if mr.before(i) {
                all_in
            } else {
                fam.reach_in[i].clone()
            };
            fam.partial_out[i] = if mr.after(i) {
                all_out
            } else {
                fam.reach_out[i].clone()
            };
        }
        fam
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mand_in(&self, i: Node) -> &FixedBitSet {
        &self.mand_in[i]
    }

    pub fn mand_out(&self, i: Node) -> &FixedBitSet {
        &self.mand_out[i]
    }

    pub fn reach_in(&self, i: Node) -> &FixedBitSet {
        &self.reach_in[i]
    }

    pub fn reach_out(&self, i: Node) -> &FixedBitSet {
        &self.reach_out[i]
    }

    pub fn partial_in(&self, i: Node) -> &FixedBitSet {
        &self.partial_in[i]
    }

    pub fn partial_out(&self, i: Node) -> &FixedBitSet {
        &self.partial_out[i]
    }

    /// `Â⁻ᵢ ∪ Â⁺ᵢ`.
    pub fn mand_both(&self, i: Node) -> FixedBitSet {
        let mut s = self.mand_in[i].clone();
        s.union_with(&self.mand_out[i]);
        s
    }

    /// Node `i` lies on at least one feasible `0 ⇝ n̄` path.
    pub fn coverable(&self, i: Node) -> bool {
        !self.mand_in[i].is_clear() || !self.mand_out[i].is_clear()
    }
}

/// Union of one family over a node set.
pub fn union_over<'a>(
    nodes: impl IntoIterator<Item = &'a Node>,
    family: impl Fn(Node) -> &'a FixedBitSet,
    num_arcs: usize,
) -> FixedBitSet {
    let mut acc = FixedBitSet::with_capacity(num_arcs);
    for &i in nodes {
        acc.union_with(family(i));
    }
    acc
}

/// A feasible `0 ⇝ n̄` path visits `i` and later `j`.
pub fn gamma(g: &AugmentedGraph, mr: &MandatoryReach, i: Node, j: Node) -> bool {
    if i == j || !g.reaches(i, j) {
        return false;
    }
    if i == 0 {
        // Source: j is on some feasible path.
        return mr.after(j) || mr.before(j);
    }
    mr.after(i) || mr.before(j) || mr.between(i, j)
}
