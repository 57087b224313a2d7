//! Valid inequalities over the arc variables of `Ḡ`.
//!
//! Node coverage `z_i` is always expanded into `Σ_{a ∈ δ⁻(i)} y_a`, so every
//! cut lives in the fixed arc index space.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::SolverError;
use crate::families::{gamma, ArcSetFamilies, MandatoryReach};
use crate::graph::{AugmentedGraph, Node, Path};
use crate::lp::{Sense, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutClass {
    Tic,
    Ipc,
    Tci,
    Tcii,
    Arc,
    Agrc,
    Rcpm,
    Rcminus,
    Rcplus,
    Gcut,
}

impl CutClass {
    pub const ALL: [CutClass; 10] = [
        CutClass::Tic,
        CutClass::Ipc,
        CutClass::Tci,
        CutClass::Tcii,
        CutClass::Arc,
        CutClass::Agrc,
        CutClass::Rcpm,
        CutClass::Rcminus,
        CutClass::Rcplus,
        CutClass::Gcut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutClass::Tic => "TIC",
            CutClass::Ipc => "IPC",
            CutClass::Tci => "TCI",
            CutClass::Tcii => "TCII",
            CutClass::Arc => "ARC",
            CutClass::Agrc => "AGRC",
            CutClass::Rcpm => "RCPM",
            CutClass::Rcminus => "RCMINUS",
            CutClass::Rcplus => "RCPLUS",
            CutClass::Gcut => "GCUT",
        }
    }
}

impl fmt::Display for CutClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutClass {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CutClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| SolverError::InvalidArgument(format!("unknown cut class {s:?}")))
    }
}

/// What a cut was generated from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Provenance {
    #[default]
    None,
    Path(Vec<Node>),
    Lifted {
        path: Vec<Node>,
        position: usize,
        node: Node,
    },
    NodeSets {
        s: Vec<Node>,
        t: Vec<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub class: CutClass,
    /// Sorted by arc index, no duplicates, no zero coefficients.
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
    pub provenance: Provenance,
}

impl Cut {
    pub fn new(
        class: CutClass,
        terms: impl IntoIterator<Item = (usize, i64)>,
        sense: Sense,
        rhs: i64,
        provenance: Provenance,
    ) -> Self {
        let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
        for (a, c) in terms {
            *merged.entry(a).or_insert(0) += c;
        }
        Cut {
            class,
            terms: merged.into_iter().filter(|&(_, c)| c != 0).collect(),
            sense,
            rhs,
            provenance,
        }
    }

    /// Hash of the inequality itself (terms, sense, rhs); class and
    /// provenance do not participate.
    pub fn canonical_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.terms.hash(&mut h);
        self.sense.hash(&mut h);
        self.rhs.hash(&mut h);
        h.finish()
    }

    /// Same inequality, ignoring class and provenance.
    pub fn same_inequality(&self, other: &Cut) -> bool {
        self.terms == other.terms && self.sense == other.sense && self.rhs == other.rhs
    }

    pub fn lhs(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|&(a, c)| c as f64 * y[a]).sum()
    }

    /// Positive when `y` violates the cut.
    pub fn violation(&self, y: &[f64]) -> f64 {
        let lhs = self.lhs(y);
        let rhs = self.rhs as f64;
        match self.sense {
            Sense::Le => lhs - rhs,
            Sense::Ge => rhs - lhs,
            Sense::Eq => (lhs - rhs).abs(),
        }
    }

    pub fn row_terms(&self) -> Vec<(usize, f64)> {
        self.terms.iter().map(|&(a, c)| (a, c as f64)).collect()
    }

    /// `CLASS sense rhs (arcIdx:coef)*`
    pub fn to_line(&self) -> String {
        let mut s = format!("{} {} {}", self.class, self.sense.symbol(), self.rhs);
        for &(a, c) in &self.terms {
            s.push_str(&format!(" {a}:{c}"));
        }
        s
    }

    pub fn from_line(line: &str) -> Result<Cut, SolverError> {
        let bad = || SolverError::InvalidArgument(format!("malformed cut line {line:?}"));
        let mut it = line.split_whitespace();
        let class: CutClass = it.next().ok_or_else(bad)?.parse()?;
        let sense = match it.next().ok_or_else(bad)? {
            "<=" => Sense::Le,
            ">=" => Sense::Ge,
            "=" => Sense::Eq,
            _ => return Err(bad()),
        };
        let rhs: i64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let mut terms = Vec::new();
        for tok in it {
            let (a, c) = tok.split_once(':').ok_or_else(bad)?;
            terms.push((a.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?));
        }
        Ok(Cut::new(class, terms, sense, rhs, Provenance::None))
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

fn z_terms(g: &AugmentedGraph, nodes: &[Node]) -> Vec<(usize, i64)> {
    nodes
        .iter()
        .flat_map(|&i| g.in_arcs(i).iter().map(|&a| (a, -1)))
        .collect()
}

/// `Σ_{a∈Â} y_a − Σ_{a∈δ⁺(0)} y_a ≥ 0`.
pub fn make_tic(g: &AugmentedGraph) -> Cut {
    let mand = g.instance().mandatory_arcs().map(|a| (a, 1));
    let starts = g.out_arcs(0).iter().map(|&a| (a, -1));
    Cut::new(
        CutClass::Tic,
        mand.chain(starts),
        Sense::Ge,
        0,
        Provenance::None,
    )
}

/// Arc indices of an infeasible `0 ⇝ n̄` path of `Ḡ`.
fn infeasible_path_arcs(g: &AugmentedGraph, p: &[Node]) -> Result<Vec<usize>, SolverError> {
    if p.len() < 3 || p[0] != 0 || *p.last().unwrap() != g.sink() {
        return Err(SolverError::InvalidArgument(format!(
            "{p:?} is not a 0 -> {} path with internal nodes",
            g.sink()
        )));
    }
    let mut arcs = Vec::with_capacity(p.len() - 1);
    for w in p.windows(2) {
        let a = g.arc_index(w[0], w[1]).ok_or_else(|| {
            SolverError::InvalidArgument(format!("{p:?} is not a path of the graph"))
        })?;
        if g.is_mandatory(a) {
            return Err(SolverError::InvalidArgument(format!(
                "{p:?} traverses mandatory arc ({},{})",
                w[0], w[1]
            )));
        }
        arcs.push(a);
    }
    Ok(arcs)
}

/// `Σ_{i=0}^{h} y_{(v_i,v_{i+1})} ≤ h` for an infeasible path.
pub fn make_ipc(g: &AugmentedGraph, p: &[Node]) -> Result<Cut, SolverError> {
    let arcs = infeasible_path_arcs(g, p)?;
    let h = (p.len() - 2) as i64;
    Ok(Cut::new(
        CutClass::Ipc,
        arcs.into_iter().map(|a| (a, 1)),
        Sense::Le,
        h,
        Provenance::Path(p.to_vec()),
    ))
}

fn tournament_terms(g: &AugmentedGraph, p: &[Node]) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if let Some(a) = g.arc_index(p[i], p[j]) {
                // Mandatory skip arcs would make the inequality invalid.
                if !g.is_mandatory(a) {
                    terms.push((a, 1));
                }
            }
        }
    }
    terms
}

/// Tournament strengthening of an IPC: every non-mandatory arc of `Ḡ`
/// joining two nodes of the path in path order.
pub fn make_tc1(g: &AugmentedGraph, p: &[Node]) -> Result<Cut, SolverError> {
    infeasible_path_arcs(g, p)?;
    let h = (p.len() - 2) as i64;
    Ok(Cut::new(
        CutClass::Tci,
        tournament_terms(g, p),
        Sense::Le,
        h,
        Provenance::Path(p.to_vec()),
    ))
}

/// The path with `k` inserted between positions `l` and `l + 1`.
pub fn lifted_path(p: &[Node], l: usize, k: Node) -> Vec<Node> {
    let mut q = Vec::with_capacity(p.len() + 1);
    q.extend_from_slice(&p[..=l]);
    q.push(k);
    q.extend_from_slice(&p[l + 1..]);
    q
}

/// Lifting of the tournament inequality by inserting `k` after `v_l`.
pub fn make_tc2(g: &AugmentedGraph, p: &[Node], l: usize, k: Node) -> Result<Cut, SolverError> {
    infeasible_path_arcs(g, p)?;
    let h = p.len() - 2;
    if l < 1 || l + 1 > h {
        return Err(SolverError::InvalidArgument(format!(
            "insertion position {l} must lie in 1..={}",
            h.saturating_sub(1)
        )));
    }
    if k == 0 || k > g.n() || p.contains(&k) {
        return Err(SolverError::InvalidArgument(format!(
            "node {k} cannot be inserted into {p:?}"
        )));
    }
    let lifted = lifted_path(p, l, k);
    infeasible_path_arcs(g, &lifted)?;
    let (vl, vl1) = (p[l], p[l + 1]);
    let extra = [
        g.arc_index(vl, k).unwrap(),
        g.arc_index(k, vl1).unwrap(),
        g.arc_index(vl, vl1).unwrap(),
    ];
    let terms = tournament_terms(g, p)
        .into_iter()
        .chain(extra.into_iter().map(|a| (a, 1)));
    Ok(Cut::new(
        CutClass::Tcii,
        terms,
        Sense::Le,
        h as i64 + 1,
        Provenance::Lifted {
            path: p.to_vec(),
            position: l,
            node: k,
        },
    ))
}

/// `Σ_{a∈Â⁻ᵢ∪Â⁺ᵢ} y_a ≥ z_i`.
pub fn make_arc_single(g: &AugmentedGraph, fam: &ArcSetFamilies, i: Node) -> Cut {
    let mut cut = make_mandatory_reach(g, fam, &[i]);
    cut.class = CutClass::Arc;
    cut
}

fn make_mandatory_reach(g: &AugmentedGraph, fam: &ArcSetFamilies, t: &[Node]) -> Cut {
    let mut arcs = FixedBitSet::with_capacity(g.num_arcs());
    for &i in t {
        arcs.union_with(fam.mand_in(i));
        arcs.union_with(fam.mand_out(i));
    }
    let terms = arcs.ones().map(|a| (a, 1)).chain(z_terms(g, t));
    Cut::new(
        CutClass::Agrc,
        terms,
        Sense::Ge,
        0,
        Provenance::NodeSets {
            s: Vec::new(),
            t: t.to_vec(),
        },
    )
}

fn check_conflicting(g: &AugmentedGraph, t: &[Node]) -> Result<(), SolverError> {
    for (x, &i) in t.iter().enumerate() {
        if i == 0 || i > g.n() {
            return Err(SolverError::InvalidArgument(format!(
                "node {i} is not in V"
            )));
        }
        for &j in &t[x + 1..] {
            if i == j || !g.conflicting(i, j) {
                return Err(SolverError::InvalidArgument(format!(
                    "nodes {i} and {j} are not conflicting"
                )));
            }
        }
    }
    Ok(())
}

/// `Σ_{a∈Â⁻_T∪Â⁺_T} y_a ≥ Σ_{i∈T} z_i` for pairwise conflicting `T`.
pub fn make_agrc(g: &AugmentedGraph, fam: &ArcSetFamilies, t: &[Node]) -> Result<Cut, SolverError> {
    check_conflicting(g, t)?;
    Ok(make_mandatory_reach(g, fam, t))
}

fn check_sets(g: &AugmentedGraph, s: &[Node], t: &[Node]) -> Result<FixedBitSet, SolverError> {
    check_conflicting(g, t)?;
    let mut in_s = FixedBitSet::with_capacity(g.num_nodes());
    for &i in s {
        if i == 0 || i > g.n() {
            return Err(SolverError::InvalidArgument(format!(
                "node {i} is not in V"
            )));
        }
        in_s.insert(i);
    }
    if let Some(&i) = t.iter().find(|&&i| !in_s.contains(i)) {
        return Err(SolverError::InvalidArgument(format!(
            "T is not a subset of S (node {i})"
        )));
    }
    Ok(in_s)
}

fn crossing(
    g: &AugmentedGraph,
    in_s: &FixedBitSet,
    family: &FixedBitSet,
    incoming: bool,
) -> Vec<(usize, i64)> {
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
        .map(|a| (a, 1))
        .collect()
}

fn family_union(g: &AugmentedGraph, t: &[Node], f: impl Fn(Node) -> FixedBitSet) -> FixedBitSet {
    let mut acc = FixedBitSet::with_capacity(g.num_arcs());
    for &i in t {
        acc.union_with(&f(i));
    }
    acc
}

fn node_sets(s: &[Node], t: &[Node]) -> Provenance {
    Provenance::NodeSets {
        s: s.to_vec(),
        t: t.to_vec(),
    }
}

/// `Σ_{δ⁻(S)∩A⁻_T} y + Σ_{δ⁺(S)∩A⁺_T} y ≥ Σ_{i∈T} z_i`.
pub fn make_rcpm(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    s: &[Node],
    t: &[Node],
) -> Result<Cut, SolverError> {
    let in_s = check_sets(g, s, t)?;
    let a_in = family_union(g, t, |i| fam.reach_in(i).clone());
    let a_out = family_union(g, t, |i| fam.reach_out(i).clone());
    let terms = crossing(g, &in_s, &a_in, true)
        .into_iter()
        .chain(crossing(g, &in_s, &a_out, false))
        .chain(z_terms(g, t));
    Ok(Cut::new(
        CutClass::Rcpm,
        terms,
        Sense::Ge,
        0,
        node_sets(s, t),
    ))
}

/// `Σ_{δ⁻(S)∩À⁻_T} y ≥ Σ_{i∈T} z_i`.
pub fn make_rcminus(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    s: &[Node],
    t: &[Node],
) -> Result<Cut, SolverError> {
    let in_s = check_sets(g, s, t)?;
    let a_in = family_union(g, t, |i| fam.partial_in(i).clone());
    let terms = crossing(g, &in_s, &a_in, true)
        .into_iter()
        .chain(z_terms(g, t));
    Ok(Cut::new(
        CutClass::Rcminus,
        terms,
        Sense::Ge,
        0,
        node_sets(s, t),
    ))
}

/// `Σ_{δ⁺(S)∩À⁺_T} y ≥ Σ_{i∈T} z_i`.
pub fn make_rcplus(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    s: &[Node],
    t: &[Node],
) -> Result<Cut, SolverError> {
    let in_s = check_sets(g, s, t)?;
    let a_out = family_union(g, t, |i| fam.partial_out(i).clone());
    let terms = crossing(g, &in_s, &a_out, false)
        .into_iter()
        .chain(z_terms(g, t));
    Ok(Cut::new(
        CutClass::Rcplus,
        terms,
        Sense::Ge,
        0,
        node_sets(s, t),
    ))
}

/// Nodes of `V̄ ∖ T` that precede no node of `T` on any feasible path.
pub fn pi_set(g: &AugmentedGraph, mr: &MandatoryReach, t: &[Node]) -> FixedBitSet {
    let mut pi = FixedBitSet::with_capacity(g.num_nodes());
    for i in 0..g.num_nodes() {
        if !t.contains(&i) && t.iter().all(|&k| !gamma(g, mr, i, k)) {
            pi.insert(i);
        }
    }
    pi
}

/// Generalized cut: arcs entering `S` from `V̄ ∖ S` whose endpoints both
/// lie outside `Π(T)`.
pub fn make_gcut(g: &AugmentedGraph, s: &[Node], t: &[Node]) -> Result<Cut, SolverError> {
    let in_s = check_sets(g, s, t)?;
    let mr = MandatoryReach::new(g);
    let pi = pi_set(g, &mr, t);
    let terms = (0..g.num_arcs())
        .filter(|&a| {
            let (u, v) = g.arc(a);
            !in_s.contains(u) && in_s.contains(v) && !pi.contains(u) && !pi.contains(v)
        })
        .map(|a| (a, 1))
        .chain(z_terms(g, t));
    Ok(Cut::new(
        CutClass::Gcut,
        terms,
        Sense::Ge,
        0,
        node_sets(s, t),
    ))
}

/// 0/1 arc-incidence vector of a collection of internal paths.
pub fn incidence_vector(g: &AugmentedGraph, paths: &[Path]) -> Result<Vec<f64>, SolverError> {
    let mut y = vec![0.0; g.num_arcs()];
    for p in paths {
        for w in p.to_augmented(g.n()).windows(2) {
            let a = g.arc_index(w[0], w[1]).ok_or_else(|| {
                SolverError::InvalidArgument(format!("{:?} is not a path of the graph", p.nodes))
            })?;
            y[a] += 1.0;
        }
    }
    Ok(y)
}

/// The cut holds on the incidence vector of `solution`.
pub fn validate_cut(g: &AugmentedGraph, cut: &Cut, solution: &[Path]) -> bool {
    match incidence_vector(g, solution) {
        Ok(y) => cut.violation(&y) <= EPS,
        Err(_) => false,
    }
}
