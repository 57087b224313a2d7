//! Arc-flow formulations, the cost encoding of the lexicographic objective,
//! and a plain branch-and-bound over the multi-commodity model.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::SolverError;
use crate::graph::{AugmentedGraph, Node, Path};
use crate::lp::{
    DenseSimplex, DualSimplex, LinearProgram, LpBackend, LpOutcome, LpStatus, RowTag, Sense, EPS,
};

/// Cost of arc `a` of `Ḡ`: 1 on source arcs, `−n` everywhere else, so a
/// path through `h` nodes costs `1 − h·n`.
pub fn arc_cost(g: &AugmentedGraph, a: usize) -> i64 {
    g.cost(a)
}

/// An LP point over the arcs of `Ḡ` with derived node coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub y: Vec<f64>,
    /// `z[i] = Σ_{a∈δ⁻(i)} y_a`, indexed over `V̄` (entries 0 and `n̄` are 0).
    pub z: Vec<f64>,
    pub objective: f64,
}

impl FractionalSolution {
    pub fn new(g: &AugmentedGraph, y: Vec<f64>) -> Self {
        let mut z = vec![0.0; g.num_nodes()];
        for (i, zi) in z.iter_mut().enumerate().take(g.n() + 1).skip(1) {
            *zi = g.in_arcs(i).iter().map(|&a| y[a]).sum();
        }
        let objective = y.iter().zip(g.costs()).map(|(v, &c)| v * c as f64).sum();
        FractionalSolution { y, z, objective }
    }

    pub fn is_integral(&self) -> bool {
        self.y.iter().all(|v| (v - v.round()).abs() <= EPS)
    }
}

/// The F2 relaxation without infeasible-path rows: in-degree at most one
/// and flow conservation at every node of `V`.
pub fn build_f2_relaxation(g: &AugmentedGraph) -> LinearProgram {
    let mut lp = LinearProgram::new(g.num_arcs());
    lp.objective = g.costs().iter().map(|&c| c as f64).collect();
    for i in 1..=g.n() {
        let terms = g.in_arcs(i).iter().map(|&a| (a, 1.0)).collect();
        lp.add_row(terms, Sense::Le, 1.0, RowTag::Degree);
    }
    for i in 1..=g.n() {
        let terms = g
            .in_arcs(i)
            .iter()
            .map(|&a| (a, 1.0))
            .chain(g.out_arcs(i).iter().map(|&a| (a, -1.0)))
            .collect();
        lp.add_row(terms, Sense::Eq, 0.0, RowTag::Flow);
    }
    lp
}

fn check_disjoint(paths: &[Path], n: usize) -> Result<(), SolverError> {
    let mut seen = vec![false; n + 1];
    for p in paths {
        for &v in &p.nodes {
            if v == 0 || v > n {
                return Err(SolverError::InvalidArgument(format!(
                    "node {v} outside 1..={n}"
                )));
            }
            if seen[v] {
                return Err(SolverError::Overlap(v));
            }
            seen[v] = true;
        }
    }
    Ok(())
}

/// `q − (covered nodes)·n` for `q` node-disjoint paths.
pub fn evaluate_cover(paths: &[Path], n: usize) -> Result<i64, SolverError> {
    check_disjoint(paths, n)?;
    let covered: usize = paths.iter().map(Path::len).sum();
    Ok(paths.len() as i64 - (covered * n) as i64)
}

/// Inverse of [`evaluate_cover`]: `(paths, covered)`.
pub fn decode_cost(w: i64, n: usize) -> Result<(usize, usize), SolverError> {
    if w == 0 {
        return Ok((0, 0));
    }
    if n == 0 || w > 0 {
        return Err(SolverError::Undecodable(w, n));
    }
    let nn = n as i64;
    let covered = (-w).div_euclid(nn) + 1;
    let q = w + covered * nn;
    if covered > nn || q < 1 || q > covered {
        return Err(SolverError::Undecodable(w, n));
    }
    Ok((q as usize, covered as usize))
}

/// Variable index of `x^k_a` in [`build_f1`]'s program (`k` is 0-based).
pub fn f1_var(g: &AugmentedGraph, k: usize, a: usize) -> usize {
    k * g.num_arcs() + a
}

/// The multi-commodity model with `m` path slots, all variables binary.
pub fn build_f1(g: &AugmentedGraph, m: usize) -> LinearProgram {
    let na = g.num_arcs();
    let mut lp = LinearProgram::new(m * na);
    for k in 0..m {
        for a in 0..na {
            lp.objective[f1_var(g, k, a)] = g.cost(a) as f64;
        }
    }
    lp.integer = vec![true; m * na];
    for k in 0..m {
        let terms = g
            .out_arcs(0)
            .iter()
            .map(|&a| (f1_var(g, k, a), 1.0))
            .collect();
        lp.add_row(terms, Sense::Le, 1.0, RowTag::SourceLimit);
    }
    for i in 1..=g.n() {
        let terms = (0..m)
            .flat_map(|k| g.in_arcs(i).iter().map(move |&a| (k, a)))
            .map(|(k, a)| (f1_var(g, k, a), 1.0))
            .collect();
        lp.add_row(terms, Sense::Le, 1.0, RowTag::Degree);
    }
    for k in 0..m {
        for i in 1..=g.n() {
            let terms = g
                .in_arcs(i)
                .iter()
                .map(|&a| (f1_var(g, k, a), 1.0))
                .chain(g.out_arcs(i).iter().map(|&a| (f1_var(g, k, a), -1.0)))
                .collect();
            lp.add_row(terms, Sense::Eq, 0.0, RowTag::Flow);
        }
    }
    for k in 0..m {
        let terms = g
            .instance()
            .mandatory_arcs()
            .map(|a| (f1_var(g, k, a), 1.0))
            .chain(g.out_arcs(0).iter().map(|&a| (f1_var(g, k, a), -1.0)))
            .collect();
        lp.add_row(terms, Sense::Ge, 0.0, RowTag::MandatoryUse);
    }
    lp
}

/// `⌊z⌋` where `z` is the LP maximum of the number of paths in the
/// multi-commodity model with `|Â|` slots.
///
/// Averaging the slots of any solution gives a solution with identical
/// slots, so the program is solved in aggregated form: one flow, at most
/// `|Â|` starts, and mandatory usage at least the number of starts.
pub fn upper_bound_m(g: &AugmentedGraph) -> Result<usize, SolverError> {
    let k = g.instance().num_mandatory();
    if k == 0 {
        return Ok(0);
    }
    let mut lp = build_f2_relaxation(g);
    lp.objective = vec![0.0; g.num_arcs()];
    for &a in g.out_arcs(0) {
        lp.objective[a] = -1.0;
    }
    let starts: Vec<(usize, f64)> = g.out_arcs(0).iter().map(|&a| (a, 1.0)).collect();
    lp.add_row(starts.clone(), Sense::Le, k as f64, RowTag::SourceLimit);
    let terms = g
        .instance()
        .mandatory_arcs()
        .map(|a| (a, 1.0))
        .chain(starts.iter().map(|&(a, _)| (a, -1.0)))
        .collect();
    lp.add_row(terms, Sense::Ge, 0.0, RowTag::MandatoryUse);
    match DenseSimplex.solve(&lp)? {
        LpOutcome::Optimal { objective, .. } => Ok((-objective + EPS).floor().max(0.0) as usize),
        other => Err(SolverError::Lp(format!(
            "path-count bound LP ended {other:?}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct F1Result {
    pub objective: i64,
    pub paths: Vec<Path>,
    pub nodes_explored: usize,
}

struct OpenNode {
    bound: f64,
    id: usize,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenNode {}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenNode {
    // Max-heap: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn f1_paths(g: &AugmentedGraph, m: usize, x: &[f64]) -> Result<Vec<Path>, SolverError> {
    let mut paths = Vec::new();
    for k in 0..m {
        let mut cur: Node = 0;
        let mut nodes = Vec::new();
        loop {
            let next = g
                .out_arcs(cur)
                .iter()
                .find(|&&a| x[f1_var(g, k, a)] > 0.5)
                .copied();
            match next {
                None if cur == 0 => break,
                None => {
                    return Err(SolverError::NotDecomposable(format!(
                        "slot {k} stops at node {cur}"
                    )))
                }
                Some(a) => {
                    let v = g.arc(a).1;
                    if v == g.sink() {
                        paths.push(Path::new(nodes));
                        break;
                    }
                    nodes.push(v);
                    cur = v;
                }
            }
        }
    }
    Ok(paths)
}

/// Exact optimum of the multi-commodity model by LP-based branch-and-bound
/// (no cuts). Slots are ordered by start usage to trim symmetric subtrees.
pub fn solve_f1(g: &AugmentedGraph, m: usize, node_limit: usize) -> Result<F1Result, SolverError> {
    if m == 0 {
        return Ok(F1Result {
            objective: 0,
            paths: Vec::new(),
            nodes_explored: 0,
        });
    }
    let mut lp = build_f1(g, m);
    for k in 1..m {
        let terms = g
            .out_arcs(0)
            .iter()
            .flat_map(|&a| [(f1_var(g, k - 1, a), 1.0), (f1_var(g, k, a), -1.0)])
            .collect();
        lp.add_row(terms, Sense::Ge, 0.0, RowTag::Symmetry);
    }
    let nvars = lp.num_vars();
    let mut ws = DualSimplex::new(&lp)?;
    let mut best_obj: i64 = 0;
    let mut best_x: Option<Vec<f64>> = None;
    let mut heap = BinaryHeap::new();
    heap.push(OpenNode {
        bound: f64::NEG_INFINITY,
        id: 0,
        fixings: Vec::new(),
    });
    let mut next_id = 1;
    let mut explored = 0;
    let mut current: Vec<(usize, f64)> = Vec::new();

    while let Some(node) = heap.pop() {
        if (node.bound - EPS).ceil() >= best_obj as f64 {
            continue;
        }
        if explored >= node_limit {
            return Err(SolverError::InvalidArgument(format!(
                "node limit {node_limit} reached"
            )));
        }
        explored += 1;
        for &(j, _) in &current {
            ws.set_bounds(j, 0.0, 1.0);
        }
        for &(j, v) in &node.fixings {
            ws.set_bounds(j, v, v);
        }
        current = node.fixings.clone();
        if ws.solve()? == LpStatus::Infeasible {
            continue;
        }
        let obj = ws.objective();
        if (obj - EPS).ceil() >= best_obj as f64 {
            continue;
        }
        let x = ws.primal();
        let branch = (0..nvars)
            .filter(|&j| (x[j] - x[j].round()).abs() > EPS)
            .min_by(|&a, &b| {
                (x[a] - 0.5)
                    .abs()
                    .total_cmp(&(x[b] - 0.5).abs())
                    .then(a.cmp(&b))
            });
        match branch {
            None => {
                best_obj = obj.round() as i64;
                best_x = Some(x);
            }
            Some(j) => {
                for v in [1.0, 0.0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    heap.push(OpenNode {
                        bound: obj,
                        id: next_id,
                        fixings,
                    });
                    next_id += 1;
                }
            }
        }
    }
    let paths = match best_x {
        Some(x) => f1_paths(g, m, &x)?,
        None => Vec::new(),
    };
    Ok(F1Result {
        objective: best_obj,
        paths,
        nodes_explored: explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{augment, Instance};

    fn lp_optimum(lp: &LinearProgram) -> f64 {
        match DenseSimplex.solve(lp).unwrap() {
            LpOutcome::Optimal { objective, .. } => objective,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cost_examples() {
        let d: Vec<(Node, Node)> = vec![(3, 9), (9, 100)];
        let g = augment(&Instance::from_pairs(100, d, &[]).unwrap());
        assert_eq!(arc_cost(&g, g.arc_index(0, 7).unwrap()), 1);
        assert_eq!(arc_cost(&g, g.arc_index(3, 9).unwrap()), -100);
        assert_eq!(arc_cost(&g, g.arc_index(9, 101).unwrap()), -100);
    }

    #[test]
    fn evaluate_and_decode() {
        assert_eq!(evaluate_cover(&[], 5).unwrap(), 0);
        let one = vec![Path::new(vec![1, 2, 3])];
        assert_eq!(evaluate_cover(&one, 100).unwrap(), -299);
        let two = vec![Path::new(vec![1, 2, 3, 4]), Path::new(vec![5, 6, 7])];
        assert_eq!(evaluate_cover(&two, 10).unwrap(), -68);
        let overlap = vec![Path::new(vec![1, 2]), Path::new(vec![2, 3])];
        assert_eq!(evaluate_cover(&overlap, 3), Err(SolverError::Overlap(2)));

        assert_eq!(decode_cost(0, 7).unwrap(), (0, 0));
        assert_eq!(decode_cost(-299, 100).unwrap(), (1, 3));
        assert_eq!(decode_cost(-68, 10).unwrap(), (2, 7));
        assert!(decode_cost(5, 10).is_err());
        // q = 0 with P > 0 is not a valid cover.
        assert!(decode_cost(-10, 10).is_err());
    }

    #[test]
    fn decode_round_trip() {
        for n in 1..=50usize {
            for covered in 1..=n {
                for q in 1..=covered {
                    let w = q as i64 - (covered * n) as i64;
                    let back = decode_cost(w, n).unwrap();
                    if n == 1 {
                        assert_eq!(back, (0, 0));
                    } else {
                        assert_eq!(back, (q, covered), "n={n} w={w}");
                    }
                }
            }
        }
    }

    #[test]
    fn f2_closed_forms() {
        let g = augment(&Instance::from_pairs(1, vec![], &[]).unwrap());
        let lp = build_f2_relaxation(&g);
        assert_eq!((lp.num_vars(), lp.num_rows()), (2, 2));
        assert!(lp_optimum(&lp).abs() < 1e-6);

        let g = augment(&Instance::from_pairs(2, vec![(1, 2)], &[(1, 2)]).unwrap());
        assert!((lp_optimum(&build_f2_relaxation(&g)) + 3.0).abs() < 1e-6);
    }

    #[test]
    fn f1_examples() {
        let g = augment(&Instance::from_pairs(2, vec![(1, 2)], &[(1, 2)]).unwrap());
        let r = solve_f1(&g, 1, 1000).unwrap();
        assert_eq!(r.objective, -3);
        assert_eq!(r.paths, vec![Path::new(vec![1, 2])]);

        let g = augment(&Instance::from_pairs(1, vec![], &[]).unwrap());
        assert_eq!(solve_f1(&g, 1, 1000).unwrap().objective, 0);

        let g = augment(&Instance::from_pairs(3, vec![(1, 2), (2, 3)], &[]).unwrap());
        assert_eq!(solve_f1(&g, 2, 1000).unwrap().objective, 0);
    }

    #[test]
    fn path_count_bound() {
        let g = augment(&Instance::from_pairs(3, vec![(1, 2), (2, 3)], &[]).unwrap());
        assert_eq!(upper_bound_m(&g).unwrap(), 0);
        let g = augment(&Instance::from_pairs(3, vec![(1, 2), (2, 3)], &[(1, 2)]).unwrap());
        assert_eq!(upper_bound_m(&g).unwrap(), 1);
    }
}
