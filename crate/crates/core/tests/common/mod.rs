#![allow(dead_code)]

use pathcover::cuts::{make_rcminus, make_rcplus, make_rcpm, Cut};
use pathcover::families::ArcSetFamilies;
use pathcover::formulation::FractionalSolution;
use pathcover::generate::gen_set_a;
use pathcover::oracle::enumerate_paths;
use pathcover::separation::RcKind;
use pathcover::{AugmentedGraph, Instance, Node};

pub const PA: [f64; 3] = [0.2, 0.5, 0.8];
pub const PAC: [f64; 4] = [0.1, 0.3, 0.5, 0.8];

/// The `i`-th instance of a deterministic small-instance sweep.
pub fn sweep_instance(i: usize, n_lo: usize, n_hi: usize) -> Instance {
    let n = n_lo + i % (n_hi - n_lo + 1);
    let pa = PA[(i / 5) % PA.len()];
    let pac = PAC[(i / 15) % PAC.len()];
    gen_set_a(n, pa, pac, 1000 + i as u64).unwrap()
}

/// Largest `Σ(y_a − 1)` over `0 ⇝ n̄` paths using only non-mandatory arcs
/// with positive value; `None` when no such path exists.
pub fn brute_longest(g: &AugmentedGraph, y: &[f64], eps: f64) -> Option<f64> {
    enumerate_paths(g, false)
        .into_iter()
        .filter_map(|p| {
            let mut total = 0.0;
            for w in p.windows(2) {
                let a = g.arc_index(w[0], w[1]).unwrap();
                if g.is_mandatory(a) || y[a] <= eps {
                    return None;
                }
                total += y[a] - 1.0;
            }
            Some(total)
        })
        .max_by(f64::total_cmp)
}

pub fn rc_cut(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    s: &[Node],
    t: &[Node],
    kind: RcKind,
) -> Cut {
    match kind {
        RcKind::PlusMinus => make_rcpm(g, fam, s, t),
        RcKind::Minus => make_rcminus(g, fam, s, t),
        RcKind::Plus => make_rcplus(g, fam, s, t),
    }
    .unwrap()
}

/// Arc mass crossing `S` in the reachability cut of the given kind.
pub fn rc_crossing(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    sol: &FractionalSolution,
    s: &[Node],
    t: &[Node],
    kind: RcKind,
) -> f64 {
    let cut = rc_cut(g, fam, s, t, kind);
    cut.lhs(&sol.y) + t.iter().map(|&i| sol.z[i]).sum::<f64>()
}

/// Minimum crossing mass over every `S` with `T ⊆ S ⊆ V`.
pub fn brute_rc_min(
    g: &AugmentedGraph,
    fam: &ArcSetFamilies,
    sol: &FractionalSolution,
    t: &[Node],
    kind: RcKind,
) -> f64 {
    let free: Vec<Node> = (1..=g.n()).filter(|i| !t.contains(i)).collect();
    (0u32..1 << free.len())
        .map(|mask| {
            let mut s: Vec<Node> = t.to_vec();
            s.extend(
                free.iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &v)| v),
            );
            s.sort_unstable();
            rc_crossing(g, fam, sol, &s, t, kind)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn three_dm_brute(q: usize, triples: &[(usize, usize, usize)]) -> bool {
    let m = triples.len();
    (0u32..(1 << m)).any(|mask| {
        if mask.count_ones() as usize != q {
            return false;
        }
        let mut used = [vec![false; q + 1], vec![false; q + 1], vec![false; q + 1]];
        for (idx, &(x, y, z)) in triples.iter().enumerate() {
            if mask >> idx & 1 == 1 {
                for (d, e) in [x, y, z].into_iter().enumerate() {
                    if used[d][e] {
                        return false;
                    }
                    used[d][e] = true;
                }
            }
        }
        true
    })
}
