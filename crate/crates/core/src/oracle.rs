//! Exhaustive ground truth for tiny instances.

use std::collections::HashSet;

use crate::error::SolverError;
use crate::graph::{AugmentedGraph, Instance, Node, Path};

/// Largest instance the exhaustive routines accept.
pub const ORACLE_MAX_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub covered: usize,
    pub paths: usize,
    pub witness: Vec<Path>,
}

fn guard(inst: &Instance) -> Result<(), SolverError> {
    if inst.n() > ORACLE_MAX_NODES {
        return Err(SolverError::OracleGuard(inst.n(), ORACLE_MAX_NODES));
    }
    Ok(())
}

/// Every path of `G` with at least one node, in lexicographic node order.
pub fn enumerate_internal_paths(inst: &Instance) -> Vec<Path> {
    fn extend(inst: &Instance, cur: &mut Vec<Node>, out: &mut Vec<Path>) {
        out.push(Path::new(cur.clone()));
        let last = *cur.last().unwrap();
        let mut next: Vec<Node> = inst
            .dag()
            .out_arcs(last)
            .iter()
            .map(|&a| inst.dag().arcs()[a].1)
            .collect();
        next.sort_unstable();
        for v in next {
            cur.push(v);
            extend(inst, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for s in 1..=inst.n() {
        let mut cur = vec![s];
        extend(inst, &mut cur, &mut out);
    }
    out
}

fn path_is_feasible(inst: &Instance, p: &[Node]) -> bool {
    p.windows(2).any(|w| inst.is_mandatory_pair(w[0], w[1]))
}

/// All feasible paths of `G`.
pub fn enumerate_feasible_paths(inst: &Instance) -> Vec<Path> {
    enumerate_internal_paths(inst)
        .into_iter()
        .filter(|p| path_is_feasible(inst, &p.nodes))
        .collect()
}

/// All `0 ⇝ n̄` paths of `Ḡ` as augmented node sequences.
pub fn enumerate_paths(g: &AugmentedGraph, feasible_only: bool) -> Vec<Vec<Node>> {
    fn dfs(
        g: &AugmentedGraph,
        cur: &mut Vec<Node>,
        feasible: bool,
        feasible_only: bool,
        out: &mut Vec<Vec<Node>>,
    ) {
        let last = *cur.last().unwrap();
        if last == g.sink() {
            if feasible || !feasible_only {
                out.push(cur.clone());
            }
            return;
        }
        let mut arcs: Vec<usize> = g.out_arcs(last).to_vec();
        arcs.sort_by_key(|&a| g.arc(a).1);
        for a in arcs {
            cur.push(g.arc(a).1);
            dfs(g, cur, feasible || g.is_mandatory(a), feasible_only, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    dfs(g, &mut cur, false, feasible_only, &mut out);
    out
}

fn mask_of(p: &Path) -> u32 {
    p.nodes.iter().fold(0u32, |m, &v| m | 1 << (v - 1))
}

/// Lexicographic optimum: most covered nodes, then fewest paths.
pub fn enumerate_best(inst: &Instance) -> Result<OracleResult, SolverError> {
    guard(inst)?;
    let n = inst.n();
    // Feasible paths grouped by their smallest node label.
    let mut by_min: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n + 1];
    let paths = enumerate_feasible_paths(inst);
    for (idx, p) in paths.iter().enumerate() {
        let min = *p.nodes.iter().min().unwrap();
        by_min[min].push((mask_of(p), idx));
    }

    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    // memo[decided] = (covered, paths, chosen path or None for "leave uncovered")
    let mut memo: Vec<Option<(usize, usize, Option<usize>)>> = vec![None; 1usize << n];

    fn better(a: (usize, usize), b: (usize, usize)) -> bool {
        a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
    }

    fn solve(
        decided: u32,
        full: u32,
        by_min: &[Vec<(u32, usize)>],
        memo: &mut Vec<Option<(usize, usize, Option<usize>)>>,
    ) -> (usize, usize) {
        if decided == full {
            return (0, 0);
        }
        if let Some((c, p, _)) = memo[decided as usize] {
            return (c, p);
        }
        let v = (!decided).trailing_zeros() as usize + 1;
        let skip = solve(decided | 1 << (v - 1), full, by_min, memo);
        let mut best = (skip.0, skip.1, None);
        for &(mask, idx) in &by_min[v] {
            if mask & decided != 0 {
                continue;
            }
            let rest = solve(decided | mask, full, by_min, memo);
            let cand = (rest.0 + mask.count_ones() as usize, rest.1 + 1);
            if better(cand, (best.0, best.1)) {
                best = (cand.0, cand.1, Some(idx));
            }
        }
        memo[decided as usize] = Some(best);
        (best.0, best.1)
    }

    let (covered, count) = solve(0, full, &by_min, &mut memo);
    let mut witness = Vec::new();
    let mut decided = 0u32;
    while decided != full {
        let v = (!decided).trailing_zeros() as usize + 1;
        match memo[decided as usize].and_then(|e| e.2) {
            Some(idx) => {
                decided |= mask_of(&paths[idx]);
                witness.push(paths[idx].clone());
            }
            None => decided |= 1 << (v - 1),
        }
    }
    debug_assert_eq!(witness.len(), count);
    Ok(OracleResult {
        covered,
        paths: count,
        witness,
    })
}

/// Largest instance [`check_fpc`] accepts.
pub const FPC_MAX_NODES: usize = 64;

/// A cover of all nodes by node-disjoint feasible paths exists.
///
/// Exact-cover backtracking over feasible paths, branching on the lowest
/// uncovered node and memoizing dead ends, so sparse instances well beyond
/// [`ORACLE_MAX_NODES`] stay tractable.
pub fn check_fpc(inst: &Instance) -> Result<bool, SolverError> {
    let n = inst.n();
    if n > FPC_MAX_NODES {
        return Err(SolverError::OracleGuard(n, FPC_MAX_NODES));
    }
    let mut by_min: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for p in enumerate_feasible_paths(inst) {
        let mask = p.nodes.iter().fold(0u64, |m, &v| m | 1 << (v - 1));
        by_min[*p.nodes.iter().min().unwrap()].push(mask);
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    fn search(used: u64, full: u64, by_min: &[Vec<u64>], dead: &mut HashSet<u64>) -> bool {
        if used == full {
            return true;
        }
        if dead.contains(&used) {
            return false;
        }
        let v = (!used).trailing_zeros() as usize + 1;
        for &mask in &by_min[v] {
            if mask & used == 0 && search(used | mask, full, by_min, dead) {
                return true;
            }
        }
        dead.insert(used);
        false
    }
    Ok(search(0, full, &by_min, &mut HashSet::new()))
}

/// Every collection of node-disjoint feasible paths (including the empty one).
///
/// Collections are listed once each, built by extending with paths whose
/// smallest node exceeds that of every earlier member.
pub fn enumerate_feasible_covers(inst: &Instance) -> Result<Vec<Vec<Path>>, SolverError> {
    guard(inst)?;
    let paths = enumerate_feasible_paths(inst);
    let mut keyed: Vec<(Node, u32, &Path)> = paths
        .iter()
        .map(|p| (*p.nodes.iter().min().unwrap(), mask_of(p), p))
        .collect();
    keyed.sort_by_key(|&(m, _, _)| m);

    fn rec<'a>(
        start: usize,
        used: u32,
        keyed: &[(Node, u32, &'a Path)],
        cur: &mut Vec<&'a Path>,
        out: &mut Vec<Vec<Path>>,
    ) {
        out.push(cur.iter().map(|&p| p.clone()).collect());
        for idx in start..keyed.len() {
            let (_, mask, p) = keyed[idx];
            if mask & used != 0 {
                continue;
            }
            // Next member must have a strictly larger minimum node.
            let next = keyed[idx..]
                .iter()
                .position(|&(m, _, _)| m > keyed[idx].0)
                .map_or(keyed.len(), |off| idx + off);
            cur.push(p);
            rec(next, used | mask, keyed, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 0, &keyed, &mut Vec::new(), &mut out);
    Ok(out)
}
