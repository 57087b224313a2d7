//! Polynomial special cases and the 3-DM reduction gadget.

use crate::error::SolverError;
use crate::graph::{Dag, Instance, Node, Path};

/// Minimum cover of every node by node-disjoint paths, ignoring the
/// mandatory-arc requirement. Uses a maximum matching on the split graph.
pub fn min_path_cover(d: &Dag) -> Vec<Path> {
    let n = d.n();
    let succ: Vec<Vec<Node>> = (0..=n)
        .map(|u| {
            if u == 0 {
                Vec::new()
            } else {
                d.out_arcs(u).iter().map(|&a| d.arcs()[a].1).collect()
            }
        })
        .collect();
    // mate_in[v] = u when the split edge u⁺–v⁻ is matched.
    let mut mate_in = vec![0usize; n + 1];
    let mut mate_out = vec![0usize; n + 1];

    fn augment(
        u: Node,
        succ: &[Vec<Node>],
        seen: &mut [bool],
        mate_in: &mut [usize],
        mate_out: &mut [usize],
    ) -> bool {
        for &v in &succ[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if mate_in[v] == 0 || augment(mate_in[v], succ, seen, mate_in, mate_out) {
                mate_in[v] = u;
                mate_out[u] = v;
                return true;
            }
        }
        false
    }

    for u in 1..=n {
        let mut seen = vec![false; n + 1];
        augment(u, &succ, &mut seen, &mut mate_in, &mut mate_out);
    }

    let mut paths = Vec::new();
    for s in 1..=n {
        if mate_in[s] != 0 {
            continue;
        }
        let mut nodes = vec![s];
        let mut cur = s;
        while mate_out[cur] != 0 {
            cur = mate_out[cur];
            nodes.push(cur);
        }
        paths.push(Path::new(nodes));
    }
    paths
}

/// Optimal full cover of the transitive closure of `1 → 2 → … → n` where
/// each path must use one of `mandatory`. `None` when no such cover exists.
pub fn solve_transitive_path(
    n: usize,
    mandatory: &[(Node, Node)],
) -> Result<Option<Vec<Path>>, SolverError> {
    for &(i, j) in mandatory {
        if i < 1 || j <= i || j > n {
            return Err(SolverError::InvalidArgument(format!(
                "mandatory pair ({i},{j}) must satisfy 1 <= i < j <= {n}"
            )));
        }
    }
    if mandatory.is_empty() {
        return Ok(None);
    }
    if mandatory.iter().any(|&(i, j)| j == i + 1) {
        return Ok(Some(vec![Path::new((1..=n).collect())]));
    }

    for &(i, ik) in mandatory {
        for &(j, jk) in mandatory {
            if ik < j {
                let mut p1: Vec<Node> = (1..=i).collect();
                p1.push(ik);
                p1.extend(j + 1..jk);
                let mut p2: Vec<Node> = (i + 1..ik).collect();
                p2.extend(ik + 1..=j);
                p2.extend(jk..=n);
                return Ok(Some(vec![Path::new(p1), Path::new(p2)]));
            }
            if ik == j + 1 {
                let mut p1: Vec<Node> = (1..=i).collect();
                p1.extend(ik..jk);
                let mut p2: Vec<Node> = (i + 1..=j).collect();
                p2.extend(jk..=n);
                return Ok(Some(vec![Path::new(p1), Path::new(p2)]));
            }
        }
    }
    Ok(None)
}

/// Node labels of one triple's gadget: `(a1, a2, b1, b2)`.
pub fn gadget_internal_nodes(q: usize, m: usize) -> (Node, Node, Node, Node) {
    let base = 3 * q + 4 * m;
    (base + 1, base + 2, base + 3, base + 4)
}

/// Instance whose full feasible cover exists iff the 3-DM instance
/// `(q, triples)` has a perfect matching.
///
/// Labels: `x_i = i`, `y_j = q + j`, `z_k = 2q + k` (all `3q` external nodes
/// are present even when unused), then four private nodes per triple in
/// input order. Indices are 1-based.
pub fn build_3dm_gadget(
    q: usize,
    triples: &[(usize, usize, usize)],
) -> Result<Instance, SolverError> {
    let mut arcs = Vec::with_capacity(8 * triples.len());
    let mut mandatory = Vec::with_capacity(3 * triples.len());
    for (m, &(xi, yj, zk)) in triples.iter().enumerate() {
        for idx in [xi, yj, zk] {
            if idx < 1 || idx > q {
                return Err(SolverError::InvalidArgument(format!(
                    "triple ({xi},{yj},{zk}) has an index outside 1..={q}"
                )));
            }
        }
        let (x, y, z) = (xi, q + yj, 2 * q + zk);
        let (a1, a2, b1, b2) = gadget_internal_nodes(q, m);
        arcs.extend([
            (x, a1),
            (a1, y),
            (y, b1),
            (b1, z),
            (z, a2),
            (a2, b2),
            (a1, a2),
            (b1, b2),
        ]);
        mandatory.extend([(x, a1), (a1, a2), (b1, b2)]);
    }
    let n = 3 * q + 4 * triples.len();
    Ok(Instance::from_pairs(n, arcs, &mandatory)?)
}
