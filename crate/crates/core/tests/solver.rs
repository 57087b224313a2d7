mod common;

use std::time::Duration;

use pathcover::cuts::{make_tic, validate_cut};
use pathcover::formulation::{decode_cost, evaluate_cover};
use pathcover::generate::gen_set_a;
use pathcover::oracle::{check_fpc, enumerate_best};
use pathcover::separation::MwisMode;
use pathcover::{
    augment, is_feasible_path, solve, CutLevel, Instance, SolveConfig, SolveReport, SolveStatus,
};

use common::sweep_instance;

fn config(cuts: CutLevel) -> SolveConfig {
    SolveConfig {
        cuts,
        ..SolveConfig::default()
    }
}

/// Paths are feasible and node-disjoint, the TIC holds, and the reported
/// numbers agree with the paths.
fn check_incumbent(inst: &Instance, r: &SolveReport) {
    let g = augment(inst);
    for p in &r.paths {
        assert!(
            is_feasible_path(inst, p).unwrap(),
            "infeasible path {:?}",
            p.nodes
        );
    }
    assert_eq!(evaluate_cover(&r.paths, inst.n()).unwrap(), r.objective);
    assert_eq!(r.covered, r.paths.iter().map(|p| p.len()).sum::<usize>());
    assert!(validate_cut(&g, &make_tic(&g), &r.paths));
    assert!(r.bound <= r.objective);
    if r.status == SolveStatus::Optimal || r.status == SolveStatus::InfeasibleEmpty {
        assert_eq!(r.bound, r.objective);
    }
}

#[test]
fn transitive_closure_with_skip_arc() {
    let arcs: Vec<(usize, usize)> = (1..=5)
        .flat_map(|i| (i + 1..=5).map(move |j| (i, j)))
        .collect();
    let inst = Instance::from_pairs(5, arcs, &[(1, 3)]).unwrap();
    assert!(!check_fpc(&inst).unwrap());
    let oracle = enumerate_best(&inst).unwrap();
    for level in CutLevel::VARIANTS {
        let r = solve(&inst, &config(level)).unwrap();
        check_incumbent(&inst, &r);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!((r.covered, r.paths.len()), (oracle.covered, oracle.paths));
        assert_eq!(
            decode_cost(r.objective, 5).unwrap(),
            (oracle.paths, oracle.covered)
        );
    }
    assert_eq!(oracle.covered, 4);
}

#[test]
fn exact_mwis_mode_matches_oracle() {
    for i in 0..60 {
        let inst = sweep_instance(i * 7 + 3, 6, 10);
        let oracle = enumerate_best(&inst).unwrap();
        for level in [CutLevel::Agrc, CutLevel::Rc] {
            let cfg = SolveConfig {
                mwis: MwisMode::Exact,
                ..config(level)
            };
            let r = solve(&inst, &cfg).unwrap();
            check_incumbent(&inst, &r);
            assert_eq!(
                (r.covered, r.paths.len()),
                (oracle.covered, oracle.paths),
                "instance {i} {level}"
            );
        }
    }
}

#[test]
fn repeated_solves_are_identical() {
    for i in 0..20 {
        let inst = gen_set_a(14, 0.5, 0.3, 500 + i).unwrap();
        for level in CutLevel::VARIANTS {
            let a = solve(&inst, &config(level)).unwrap();
            let b = solve(&inst, &config(level)).unwrap();
            assert_eq!(a.status, b.status);
            assert_eq!(
                (a.objective, a.bound, a.tree_nodes),
                (b.objective, b.bound, b.tree_nodes)
            );
            assert_eq!(a.cut_counts, b.cut_counts);
            assert_eq!(a.paths, b.paths);
            assert_eq!(a.pool, b.pool);
            assert_eq!(a.root_bound.to_bits(), b.root_bound.to_bits());
        }
    }
}

/// Interrupted searches still report a sound incumbent and bound.
#[test]
fn truncated_searches_stay_sound() {
    let mut interrupted = 0;
    for i in 0..30 {
        let inst = gen_set_a(25, 0.2, 0.5, 700 + i).unwrap();
        let full = solve(&inst, &config(CutLevel::Ipc)).unwrap();
        check_incumbent(&inst, &full);
        for limit in [1, 2, 4, 8] {
            let cfg = SolveConfig {
                node_limit: Some(limit),
                ..config(CutLevel::Ipc)
            };
            let r = solve(&inst, &cfg).unwrap();
            check_incumbent(&inst, &r);
            assert!(r.bound <= full.objective && full.objective <= r.objective);
            if r.status == SolveStatus::Feasible {
                interrupted += 1;
            }
        }
        let cfg = SolveConfig {
            time_limit: Some(Duration::ZERO),
            ..config(CutLevel::Rc)
        };
        let r = solve(&inst, &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::Timeout);
        check_incumbent(&inst, &r);
    }
    assert!(interrupted > 0, "node limits never bit");
}

#[test]
fn child_bounds_never_drop_below_parent() {
    for i in 0..40 {
        let inst = gen_set_a(20, 0.2, 0.2 + 0.1 * (i % 4) as f64, 900 + i).unwrap();
        for level in CutLevel::VARIANTS {
            let r = solve(&inst, &config(level)).unwrap();
            check_incumbent(&inst, &r);
            assert_eq!(r.bound_regressions, 0, "seed {i} {level}");
        }
    }
}

#[test]
fn record_lists_every_field() {
    let inst = Instance::from_pairs(3, vec![(1, 2), (2, 3)], &[(1, 2)]).unwrap();
    let r = solve(&inst, &SolveConfig::default()).unwrap();
    let record = r.to_record();
    let keys: Vec<&str> = record
        .lines()
        .map(|l| l.split('=').next().unwrap())
        .collect();
    for key in [
        "status",
        "paths",
        "nodes",
        "objective",
        "bound",
        "root_bound",
        "#cuts",
        "tree-nodes",
        "t(s)",
        "t_sep(s)",
    ] {
        assert!(keys.contains(&key), "missing {key}");
    }
    assert!(record.contains("status=optimal\n"));
    assert!(record.contains("objective=-8\n"));
    assert!(record.contains("path.1=1 2 3\n"));
}
