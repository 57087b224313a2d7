//! Separation of violated cuts from fractional LP points.

use fixedbitset::FixedBitSet;

use crate::cuts::{
    lifted_path, make_agrc, make_rcminus, make_rcplus, make_rcpm, make_tc1, make_tc2, make_tic,
    Cut, CutClass,
};
use crate::families::ArcSetFamilies;
use crate::flow::{min_cut_side, CutSide, FlowNetwork};
use crate::formulation::FractionalSolution;
use crate::graph::{AugmentedGraph, Node};
use crate::lp::EPS;

/// Default number of cuts kept per class in one separation round.
pub const MAX_CUTS_PER_CLASS: usize = 50;

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwisMode {
    #[default]
    Greedy,
    Exact,
}

/// Arcs of `Ḡ` with positive LP value, optionally without mandatory arcs.
#[derive(Debug, Clone)]
pub struct SupportGraph {
    /// `weight[a]` is `Some` exactly for arcs in the support.
    pub weight: Vec<Option<f64>>,
}

impl SupportGraph {
    /// Support of `y` with arc weights `y_a − 1`.
    pub fn new(g: &AugmentedGraph, y: &[f64], drop_mandatory: bool) -> Self {
        let weight = (0..g.num_arcs())
            .map(|a| {
                let keep = y[a] > EPS && !(drop_mandatory && g.is_mandatory(a));
                keep.then(|| y[a] - 1.0)
            })
            .collect();
        SupportGraph { weight }
    }

    pub fn arcs(&self) -> impl Iterator<Item = usize> + '_ {
        self.weight
            .iter()
            .enumerate()
            .filter_map(|(a, w)| w.map(|_| a))
    }
}

/// Maximum-weight `0 ⇝ n̄` path over the arcs carrying a weight. Ties keep
/// the predecessor arc with the lowest index.
pub fn longest_path_dag(g: &AugmentedGraph, sg: &SupportGraph) -> Option<(Vec<Node>, f64)> {
    let nodes = g.num_nodes();
    let mut best: Vec<Option<f64>> = vec![None; nodes];
    let mut pred: Vec<Option<usize>> = vec![None; nodes];
    best[0] = Some(0.0);
    for &v in g.topo_order() {
        if v == 0 {
            continue;
        }
        let mut in_arcs: Vec<usize> = g.in_arcs(v).to_vec();
        in_arcs.sort_unstable();
        for a in in_arcs {
            let (Some(w), (u, _)) = (sg.weight[a], g.arc(a)) else {
                continue;
            };
            let Some(bu) = best[u] else { continue };
            let cand = bu + w;
            if best[v].is_none_or(|bv| cand > bv + TIE_TOL) {
                best[v] = Some(cand);
                pred[v] = Some(a);
            }
        }
    }
    let value = best[g.sink()]?;
    let mut path = vec![g.sink()];
    let mut cur = g.sink();
    while cur != 0 {
        cur = g.arc(pred[cur].unwrap()).0;
        path.push(cur);
    }
    path.reverse();
    Some((path, value))
}

fn push_if_violated(out: &mut Vec<Cut>, cut: Cut, y: &[f64], cap: usize) {
    if cut.violation(y) > EPS
        && out.iter().filter(|c| c.class == cut.class).count() < cap
        && !out.iter().any(|c| c.same_inequality(&cut))
    {
        out.push(cut);
    }
}

/// Exact IPC separation by a longest path in the support graph without
/// mandatory arcs, strengthened to TC-I, then lifted to TC-II (and TC-I of
/// each lifted path) for every admissible insertion.
pub fn separate_ipc_tc(g: &AugmentedGraph, sol: &FractionalSolution, cap: usize) -> Vec<Cut> {
    let sg = SupportGraph::new(g, &sol.y, true);
    let Some((path, alpha)) = longest_path_dag(g, &sg) else {
        return Vec::new();
    };
    if alpha + 1.0 <= EPS {
        return Vec::new();
    }
    let mut out = Vec::new();
    let base = make_tc1(g, &path).expect("longest path avoids mandatory arcs");
    push_if_violated(&mut out, base, &sol.y, cap);
    let h = path.len() - 2;
    let mut on_path = vec![false; g.num_nodes()];
    for &v in &path {
        on_path[v] = true;
    }
    for l in 1..h {
        for k in 1..=g.n() {
            if on_path[k] {
                continue;
            }
            let (Some(a1), Some(a2)) = (g.arc_index(path[l], k), g.arc_index(k, path[l + 1]))
            else {
                continue;
            };
            if g.is_mandatory(a1) || g.is_mandatory(a2) {
                continue;
            }
            if let Ok(cut) = make_tc2(g, &path, l, k) {
                push_if_violated(&mut out, cut, &sol.y, cap);
            }
            if let Ok(cut) = make_tc1(g, &lifted_path(&path, l, k)) {
                push_if_violated(&mut out, cut, &sol.y, cap);
            }
        }
    }
    out
}

/// The TIC when violated.
pub fn separate_tic(g: &AugmentedGraph, sol: &FractionalSolution) -> Option<Cut> {
    let cut = make_tic(g);
    (cut.violation(&sol.y) > EPS).then_some(cut)
}

/// Undirected graph on `V` joining every non-conflicting pair.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl ConflictGraph {
    pub fn new(g: &AugmentedGraph) -> Self {
        let n = g.n();
        let mut adj = vec![FixedBitSet::with_capacity(n + 1); n + 1];
        let dag = g.instance().dag();
        for i in 1..=n {
            for j in dag.descendants(i).ones() {
                if j != i {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        ConflictGraph { n, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: Node, j: Node) -> bool {
        self.adj[i].contains(j)
    }

    pub fn is_independent(&self, set: &[Node]) -> bool {
        set.iter()
            .enumerate()
            .all(|(x, &i)| set[x + 1..].iter().all(|&j| i != j && !self.adjacent(i, j)))
    }
}

/// Greedy maximum-weight independent set: repeatedly take the node
/// maximizing `W(i)/(deg(i)+1)` in the remaining graph, then drop its
/// neighbours. Only nodes with weight above tolerance take part.
pub fn gwmin(cg: &ConflictGraph, weight: &[f64]) -> Vec<Node> {
    gwmin_with(
        cg,
        (1..=cg.n()).filter(|&i| weight[i] > EPS).collect(),
        |i, _| weight[i],
    )
}

/// GWMIN core; `current(i, chosen)` gives the weight of `i` given the nodes
/// selected so far. Nodes whose current weight drops to tolerance leave.
fn gwmin_with(
    cg: &ConflictGraph,
    candidates: Vec<Node>,
    current: impl Fn(Node, &[Node]) -> f64,
) -> Vec<Node> {
    let mut alive = FixedBitSet::with_capacity(cg.n() + 1);
    for &i in &candidates {
        alive.insert(i);
    }
    let mut chosen = Vec::new();
    loop {
        let mut best: Option<(Node, f64, f64)> = None;
        let mut drop = Vec::new();
        for i in alive.ones() {
            let w = current(i, &chosen);
            if w <= EPS {
                drop.push(i);
                continue;
            }
            let mut nb = cg.adj[i].clone();
            nb.intersect_with(&alive);
            let ratio = w / (nb.count_ones(..) as f64 + 1.0);
            if best.is_none_or(|(_, br, _)| ratio > br + TIE_TOL) {
                best = Some((i, ratio, w));
            }
        }
        for i in drop {
            alive.set(i, false);
        }
        let Some((i, _, _)) = best else { break };
        chosen.push(i);
        alive.set(i, false);
        alive.difference_with(&cg.adj[i]);
    }
    chosen
}

/// Node budget of the exact independent-set searches.
pub const EXACT_SEARCH_LIMIT: usize = 2_000_000;

/// Maximum-weight independent set by branch and bound over nodes with
/// positive weight. Returns the best set found within the search budget.
pub fn mwis_exact(cg: &ConflictGraph, weight: &[f64]) -> Vec<Node> {
    let cand: Vec<Node> = (1..=cg.n()).filter(|&i| weight[i] > EPS).collect();
    let objective = |set: &[Node]| set.iter().map(|&i| weight[i]).sum::<f64>();
    let bound =
        |set: &[Node], rest: &[Node]| objective(set) + rest.iter().map(|&i| weight[i]).sum::<f64>();
    independent_set_search(cg, &cand, &objective, &bound)
}

fn independent_set_search(
    cg: &ConflictGraph,
    cand: &[Node],
    objective: &dyn Fn(&[Node]) -> f64,
    bound: &dyn Fn(&[Node], &[Node]) -> f64,
) -> Vec<Node> {
    struct Search<'a> {
        cg: &'a ConflictGraph,
        objective: &'a dyn Fn(&[Node]) -> f64,
        bound: &'a dyn Fn(&[Node], &[Node]) -> f64,
        best: Vec<Node>,
        best_val: f64,
        visited: usize,
    }
    impl Search<'_> {
        fn go(&mut self, chosen: &mut Vec<Node>, rest: &[Node]) {
            self.visited += 1;
            let val = (self.objective)(chosen);
            if val > self.best_val + TIE_TOL {
                self.best_val = val;
                self.best = chosen.clone();
            }
            if rest.is_empty()
                || self.visited >= EXACT_SEARCH_LIMIT
                || (self.bound)(chosen, rest) <= self.best_val + TIE_TOL
            {
                return;
            }
            let i = rest[0];
            let compatible: Vec<Node> = rest[1..]
                .iter()
                .copied()
                .filter(|&j| !self.cg.adjacent(i, j))
                .collect();
            chosen.push(i);
            self.go(chosen, &compatible);
            chosen.pop();
            self.go(chosen, &rest[1..]);
        }
    }
    let mut s = Search {
        cg,
        objective,
        bound,
        best: Vec::new(),
        best_val: 0.0,
        visited: 0,
    };
    s.go(&mut Vec::new(), cand);
    s.best
}

/// `Σ_{i∈T} z_i − y(Â⁻_T ∪ Â⁺_T)`.
pub fn agrc_weight(fam: &ArcSetFamilies, sol: &FractionalSolution, t: &[Node]) -> f64 {
    let mut arcs = FixedBitSet::with_capacity(sol.y.len());
    for &i in t {
        arcs.union_with(fam.mand_in(i));
        arcs.union_with(fam.mand_out(i));
    }
    t.iter().map(|&i| sol.z[i]).sum::<f64>() - arcs.ones().map(|a| sol.y[a]).sum::<f64>()
}

/// Node set chosen for A-GRC separation.
pub fn agrc_select(
    cg: &ConflictGraph,
    fam: &ArcSetFamilies,
    sol: &FractionalSolution,
    mode: MwisMode,
) -> Vec<Node> {
    let n = cg.n();
    let both: Vec<FixedBitSet> = (0..=n)
        .map(|i| {
            if i == 0 {
                FixedBitSet::new()
            } else {
                fam.mand_both(i)
            }
        })
        .collect();
    match mode {
        MwisMode::Greedy => {
            let base = |i: Node| sol.z[i] - both[i].ones().map(|a| sol.y[a]).sum::<f64>();
            let cand = (1..=n).filter(|&i| base(i) > EPS).collect();
            // Weight of i net of arcs already charged to chosen nodes.
            gwmin_with(cg, cand, |i, chosen| {
                let mut taken = FixedBitSet::with_capacity(sol.y.len());
                for &c in chosen {
                    taken.union_with(&both[c]);
                }
                sol.z[i]
                    - both[i]
                        .ones()
                        .filter(|&a| !taken.contains(a))
                        .map(|a| sol.y[a])
                        .sum::<f64>()
            })
        }
        MwisMode::Exact => {
            let cand: Vec<Node> = (1..=n).filter(|&i| sol.z[i] > EPS).collect();
            let objective = |set: &[Node]| agrc_weight(fam, sol, set);
            let bound = |set: &[Node], rest: &[Node]| {
                agrc_weight(fam, sol, set) + rest.iter().map(|&i| sol.z[i]).sum::<f64>()
            };
            independent_set_search(cg, &cand, &objective, &bound)
        }
    }
}

/// The A-GRC of the selected node set when it is violated.
pub fn separate_agrc(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    cg: &ConflictGraph,
    sol: &FractionalSolution,
    mode: MwisMode,
) -> Option<Cut> {
    let mut t = agrc_select(cg, fam, sol, mode);
    if t.is_empty() || agrc_weight(fam, sol, &t) <= EPS {
        return None;
    }
    t.sort_unstable();
    let cut = make_agrc(g, fam, &t).expect("independent sets are conflicting");
    (cut.violation(&sol.y) > EPS).then_some(cut)
}

/// Conflicting node set maximizing coverage, used by all reachability cuts.
pub fn rc_select(cg: &ConflictGraph, sol: &FractionalSolution, mode: MwisMode) -> Vec<Node> {
    let mut t = match mode {
        MwisMode::Greedy => gwmin(cg, &sol.z),
        MwisMode::Exact => mwis_exact(cg, &sol.z),
    };
    t.sort_unstable();
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcKind {
    PlusMinus,
    Minus,
    Plus,
}

impl RcKind {
    pub fn class(self) -> CutClass {
        match self {
            RcKind::PlusMinus => CutClass::Rcpm,
            RcKind::Minus => CutClass::Rcminus,
            RcKind::Plus => CutClass::Rcplus,
        }
    }
}

/// Minimum-crossing set `S ⊇ T` found by max flow, with the partial masses
/// used to check the union argument for `RC±`.
#[derive(Debug, Clone, PartialEq)]
pub struct RcCandidate {
    pub t: Vec<Node>,
    pub s: Vec<Node>,
    /// Left-hand arc mass of the cut on `S` (without the `z` terms).
    pub crossing: f64,
    pub coverage: f64,
    /// `(flow₁, mass of δ⁻(S)∩A⁻_T, flow₂, mass of δ⁺(S)∩A⁺_T)` for `RC±`.
    pub union_check: Option<(f64, f64, f64, f64)>,
}

fn mass(
    g: &AugmentedGraph,
    y: &[f64],
    in_s: &FixedBitSet,
    family: &FixedBitSet,
    incoming: bool,
) -> f64 {
    family
        .ones()
        .filter(|&a| {
            let (u, v) = g.arc(a);
            if incoming {
                !in_s.contains(u) && in_s.contains(v)
            } else {
                in_s.contains(u) && !in_s.contains(v)
            }
        })
        .map(|a| y[a])
        .sum()
}

fn union_family(t: &[Node], num_arcs: usize, f: impl Fn(Node) -> FixedBitSet) -> FixedBitSet {
    let mut acc = FixedBitSet::with_capacity(num_arcs);
    for &i in t {
        acc.union_with(&f(i));
    }
    acc
}

fn big_m(g: &AugmentedGraph) -> f64 {
    (g.num_nodes() + 1) as f64
}

/// Sink side of the prefix network: family arcs at capacity `y`, plus an
/// uncapacitated arc from each node of `T` to `n̄`.
fn prefix_side(
    g: &AugmentedGraph,
    y: &[f64],
    t: &[Node],
    family: &FixedBitSet,
) -> (f64, Vec<Node>) {
    let mut net = FlowNetwork::new(g.num_nodes());
    for a in family.ones() {
        let (u, v) = g.arc(a);
        net.add_edge(u, v, y[a].max(0.0));
    }
    for &i in t {
        net.add_edge(i, g.sink(), big_m(g));
    }
    min_cut_side(&net, 0, g.sink(), CutSide::Sink)
}

/// Source side of the suffix network: an uncapacitated arc from `0` to
/// each node of `T`, plus family arcs at capacity `y`.
fn suffix_side(
    g: &AugmentedGraph,
    y: &[f64],
    t: &[Node],
    family: &FixedBitSet,
) -> (f64, Vec<Node>) {
    let mut net = FlowNetwork::new(g.num_nodes());
    for &i in t {
        net.add_edge(0, i, big_m(g));
    }
    for a in family.ones() {
        let (u, v) = g.arc(a);
        net.add_edge(u, v, y[a].max(0.0));
    }
    min_cut_side(&net, 0, g.sink(), CutSide::Source)
}

/// Minimum-crossing `S` for a fixed `T`.
pub fn rc_candidate(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    sol: &FractionalSolution,
    t: &[Node],
    kind: RcKind,
) -> RcCandidate {
    let m = g.num_arcs();
    let coverage = t.iter().map(|&i| sol.z[i]).sum();
    let mut in_s = FixedBitSet::with_capacity(g.num_nodes());
    let (s, crossing, union_check) = match kind {
        RcKind::Minus => {
            let fam_in = union_family(t, m, |i| fam.partial_in(i).clone());
            let (value, s) = prefix_side(g, &sol.y, t, &fam_in);
            (s, value, None)
        }
        RcKind::Plus => {
            let fam_out = union_family(t, m, |i| fam.partial_out(i).clone());
            let (value, s) = suffix_side(g, &sol.y, t, &fam_out);
            (s, value, None)
        }
        RcKind::PlusMinus => {
            let fam_in = union_family(t, m, |i| fam.reach_in(i).clone());
            let fam_out = union_family(t, m, |i| fam.reach_out(i).clone());
            let (f1, s1) = prefix_side(g, &sol.y, t, &fam_in);
            let (f2, s2) = suffix_side(g, &sol.y, t, &fam_out);
            let mut s: Vec<Node> = s1.into_iter().chain(s2).collect();
            s.sort_unstable();
            s.dedup();
            for &v in &s {
                in_s.insert(v);
            }
            let m_in = mass(g, &sol.y, &in_s, &fam_in, true);
            let m_out = mass(g, &sol.y, &in_s, &fam_out, false);
            (s, m_in + m_out, Some((f1, m_in, f2, m_out)))
        }
    };
    RcCandidate {
        t: t.to_vec(),
        s,
        crossing,
        coverage,
        union_check,
    }
}

/// A violated reachability cut of the requested kind, if any.
pub fn separate_rc(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    cg: &ConflictGraph,
    sol: &FractionalSolution,
    kind: RcKind,
    mode: MwisMode,
) -> Option<Cut> {
    let t = rc_select(cg, sol, mode);
    if t.is_empty() {
        return None;
    }
    let cand = rc_candidate(g, fam, sol, &t, kind);
    if cand.crossing >= cand.coverage - EPS {
        return None;
    }
    let cut = match kind {
        RcKind::PlusMinus => make_rcpm(g, fam, &cand.s, &t),
        RcKind::Minus => make_rcminus(g, fam, &cand.s, &t),
        RcKind::Plus => make_rcplus(g, fam, &cand.s, &t),
    }
    .expect("T is conflicting and contained in S");
    (cut.violation(&sol.y) > EPS).then_some(cut)
}
