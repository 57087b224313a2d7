mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathcover::cuts::validate_cut;
use pathcover::families::ArcSetFamilies;
use pathcover::flow::{min_cut_side, CutSide, FlowNetwork};
use pathcover::formulation::FractionalSolution;
use pathcover::oracle::enumerate_feasible_covers;
use pathcover::separation::{
    agrc_select, agrc_weight, gwmin, longest_path_dag, mwis_exact, separate_agrc, separate_ipc_tc,
    separate_rc, ConflictGraph, MwisMode, RcKind, SupportGraph, MAX_CUTS_PER_CLASS,
};
use pathcover::{augment, AugmentedGraph, Node};

use common::{brute_longest, sweep_instance};

const EPS: f64 = 1e-6;

/// Arc values in `[0, 1]`, a third of them exactly zero.
fn random_point(g: &AugmentedGraph, rng: &mut ChaCha8Rng) -> FractionalSolution {
    let y = (0..g.num_arcs())
        .map(|_| {
            if rng.gen_bool(0.33) {
                0.0
            } else {
                rng.gen_range(0.0..=1.0)
            }
        })
        .collect();
    FractionalSolution::new(g, y)
}

fn independent_subsets(cg: &ConflictGraph) -> Vec<Vec<Node>> {
    let n = cg.n();
    (0u32..1 << n)
        .map(|mask| {
            (1..=n)
                .filter(|&i| mask >> (i - 1) & 1 == 1)
                .collect::<Vec<_>>()
        })
        .filter(|set| cg.is_independent(set))
        .collect()
}

#[test]
fn exact_independent_sets_are_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..80 {
        let g = augment(&sweep_instance(i, 2, 10));
        let cg = ConflictGraph::new(&g);
        let fam = ArcSetFamilies::new(&g);
        let sol = random_point(&g, &mut rng);
        let subsets = independent_subsets(&cg);

        let w = |set: &[Node]| set.iter().map(|&v| sol.z[v]).sum::<f64>();
        let exact = mwis_exact(&cg, &sol.z);
        let greedy = gwmin(&cg, &sol.z);
        assert!(cg.is_independent(&exact) && cg.is_independent(&greedy));
        let best = subsets.iter().map(|s| w(s)).fold(0.0, f64::max);
        assert!((w(&exact) - best).abs() <= 1e-9, "instance {i}");
        assert!(w(&greedy) <= best + 1e-9);

        let a_exact = agrc_select(&cg, &fam, &sol, MwisMode::Exact);
        let a_greedy = agrc_select(&cg, &fam, &sol, MwisMode::Greedy);
        assert!(cg.is_independent(&a_exact) && cg.is_independent(&a_greedy));
        let a_best = subsets
            .iter()
            .map(|s| agrc_weight(&fam, &sol, s))
            .fold(0.0, f64::max);
        assert!(
            (agrc_weight(&fam, &sol, &a_exact) - a_best).abs() <= 1e-9,
            "instance {i}"
        );
        assert!(agrc_weight(&fam, &sol, &a_greedy) <= a_best + 1e-9);
    }
}

#[test]
fn longest_path_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..150 {
        let g = augment(&sweep_instance(i, 1, 9));
        let sol = random_point(&g, &mut rng);
        let sg = SupportGraph::new(&g, &sol.y, true);
        let got = longest_path_dag(&g, &sg);
        let want = brute_longest(&g, &sol.y, EPS);
        match (got, want) {
            (Some((path, v)), Some(w)) => {
                assert!((v - w).abs() <= 1e-9, "instance {i}: {v} vs {w}");
                let along: f64 = path
                    .windows(2)
                    .map(|p| sg.weight[g.arc_index(p[0], p[1]).unwrap()].unwrap())
                    .sum();
                assert!((along - v).abs() <= 1e-9);
            }
            (None, None) => {}
            (got, want) => panic!("instance {i}: {got:?} vs {want:?}"),
        }
    }
}

/// Every returned cut is violated at the point and holds on every feasible
/// cover of the instance.
#[test]
fn separated_cuts_are_violated_and_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..60 {
        let inst = sweep_instance(i, 3, 7);
        let g = augment(&inst);
        let fam = ArcSetFamilies::new(&g);
        let cg = ConflictGraph::new(&g);
        let covers = enumerate_feasible_covers(&inst).unwrap();
        for _ in 0..5 {
            let sol = random_point(&g, &mut rng);
            let mut cuts = separate_ipc_tc(&g, &sol, MAX_CUTS_PER_CLASS);
            for mode in [MwisMode::Greedy, MwisMode::Exact] {
                cuts.extend(separate_agrc(&g, &fam, &cg, &sol, mode));
                for kind in [RcKind::PlusMinus, RcKind::Minus, RcKind::Plus] {
                    cuts.extend(separate_rc(&g, &fam, &cg, &sol, kind, mode));
                }
            }
            for cut in &cuts {
                assert!(cut.violation(&sol.y) > EPS, "{}", cut.to_line());
                for cover in &covers {
                    assert!(
                        validate_cut(&g, cut, cover),
                        "instance {i}: {}",
                        cut.to_line()
                    );
                }
            }
        }
    }
}

/// Minimum `s`-`t` cut by enumerating every node bipartition.
fn brute_min_cut(nodes: usize, edges: &[(usize, usize, f64)], s: usize, t: usize) -> f64 {
    let free: Vec<usize> = (0..nodes).filter(|&v| v != s && v != t).collect();
    (0u32..1 << free.len())
        .map(|mask| {
            let mut side = vec![false; nodes];
            side[s] = true;
            for (b, &v) in free.iter().enumerate() {
                side[v] = mask >> b & 1 == 1;
            }
            edges
                .iter()
                .filter(|&&(u, v, _)| side[u] && !side[v])
                .map(|e| e.2)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn network(nodes: usize, edges: &[(usize, usize, f64)]) -> FlowNetwork {
    let mut net = FlowNetwork::new(nodes);
    for &(u, v, c) in edges {
        net.add_edge(u, v, c);
    }
    net
}

fn edge_list() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..9).prop_flat_map(|nodes| {
        let edge = (0..nodes, 0..nodes, 0.0f64..3.0);
        (Just(nodes), prop::collection::vec(edge, 0..20))
            .prop_map(|(n, e)| (n, e.into_iter().filter(|&(u, v, _)| u != v).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn max_flow_equals_min_cut((nodes, edges) in edge_list(), seed in any::<u64>()) {
        let t = nodes - 1;
        let (value, source_side) = min_cut_side(&network(nodes, &edges), 0, t, CutSide::Source);
        let brute = brute_min_cut(nodes, &edges, 0, t);
        prop_assert!((value - brute).abs() <= 1e-9);

        // The reported side realizes the cut value.
        let mut side = vec![false; nodes];
        side[0] = true;
        for v in source_side {
            side[v] = true;
        }
        let realized: f64 = edges.iter().filter(|&&(u, v, _)| side[u] && !side[v]).map(|e| e.2).sum();
        prop_assert!((realized - value).abs() <= 1e-9);

        let mut shuffled = edges.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (permuted, _) = min_cut_side(&network(nodes, &shuffled), 0, t, CutSide::Sink);
        prop_assert!((permuted - value).abs() <= 1e-9);
    }

    #[test]
    fn greedy_sets_are_independent(i in 0usize..400, weights in prop::collection::vec(0.0f64..2.0, 32)) {
        let g = augment(&sweep_instance(i, 2, 30));
        let cg = ConflictGraph::new(&g);
        let mut w = vec![0.0; g.num_nodes()];
        for v in 1..=g.n() {
            w[v] = weights[v % weights.len()];
        }
        prop_assert!(cg.is_independent(&gwmin(&cg, &w)));
    }
}
