//! Acceptance gate: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{brute_longest, brute_rc_min, sweep_instance, three_dm_brute};
use pathcover::branch_and_cut::{best_gap, obj_gap, solve, CutLevel, SolveConfig, SolveStatus};
use pathcover::cuts::{
    incidence_vector, lifted_path, make_agrc, make_arc_single, make_gcut, make_ipc, make_rcminus,
    make_rcplus, make_rcpm, make_tc1, make_tc2, make_tic, Cut,
};
use pathcover::families::ArcSetFamilies;
use pathcover::formulation::{solve_f1, upper_bound_m, FractionalSolution};
use pathcover::generate::gen_set_a;
use pathcover::lp::EPS;
use pathcover::oracle::{check_fpc, enumerate_best, enumerate_feasible_covers, enumerate_paths};
use pathcover::separation::{
    longest_path_dag, rc_candidate, rc_select, separate_ipc_tc, ConflictGraph, MwisMode, RcKind,
    SupportGraph, MAX_CUTS_PER_CLASS,
};
use pathcover::special::{build_3dm_gadget, solve_transitive_path};
use pathcover::{augment, AugmentedGraph, Instance, Node};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pinned tolerances.
const TOL_SEPARATION: f64 = 1e-6;
const TOL_BOUND: f64 = 1e-6;
const TOL_METRIC: f64 = 1e-9;
const TIME_CAP: Duration = Duration::from_secs(10);
const COVER_QUOTA: f64 = 0.9;

type Outcome = Result<String, String>;

fn config(level: CutLevel) -> SolveConfig {
    SolveConfig {
        cuts: level,
        ..SolveConfig::default()
    }
}

fn c1_oracle_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for i in 0..200 {
        let inst = sweep_instance(i, 6, 10);
        let truth = enumerate_best(&inst).map_err(|e| e.to_string())?;
        for level in CutLevel::VARIANTS {
            let r = solve(&inst, &config(level)).map_err(|e| e.to_string())?;
            runs += 1;
            if (r.covered, r.paths.len()) != (truth.covered, truth.paths) {
                mismatches.push(format!(
                    "instance {i} [{level}]: solver ({}, {}) vs oracle ({}, {})",
                    r.covered,
                    r.paths.len(),
                    truth.covered,
                    truth.paths
                ));
            }
        }
    }
    if mismatches.is_empty() {
        Ok(format!(
            "{runs}/{runs} solves match the oracle (tolerance 0)"
        ))
    } else {
        Err(format!(
            "{} mismatches; first: {}",
            mismatches.len(),
            mismatches[0]
        ))
    }
}

fn random_conflicting(rng: &mut ChaCha8Rng, cg: &ConflictGraph, n: usize) -> Vec<Node> {
    let mut order: Vec<Node> = (1..=n).collect();
    order.shuffle(rng);
    let size = rng.gen_range(1..=3);
    let mut t: Vec<Node> = Vec::new();
    for v in order {
        if t.len() < size && t.iter().all(|&u| !cg.adjacent(u, v)) {
            t.push(v);
        }
    }
    t.sort_unstable();
    t
}

fn constructor_cuts(g: &AugmentedGraph, rng: &mut ChaCha8Rng) -> Vec<Cut> {
    let n = g.n();
    let fam = ArcSetFamilies::new(g);
    let cg = ConflictGraph::new(g);
    let mut cuts = vec![make_tic(g)];
    for p in enumerate_paths(g, false) {
        let Ok(ipc) = make_ipc(g, &p) else { continue };
        cuts.push(ipc);
        cuts.push(make_tc1(g, &p).unwrap());
        let h = p.len() - 2;
        for l in 1..h {
            for k in 1..=n {
                if let Ok(c) = make_tc2(g, &p, l, k) {
                    cuts.push(c);
                    if let Ok(c) = make_tc1(g, &lifted_path(&p, l, k)) {
                        cuts.push(c);
                    }
                }
            }
        }
    }
    for i in 1..=n {
        cuts.push(make_arc_single(g, &fam, i));
    }
    for _ in 0..40 {
        let t = random_conflicting(rng, &cg, n);
        let mut s = t.clone();
        for v in 1..=n {
            if !s.contains(&v) && rng.gen_bool(0.4) {
                s.push(v);
            }
        }
        s.sort_unstable();
        cuts.push(make_agrc(g, &fam, &t).unwrap());
        cuts.push(make_rcpm(g, &fam, &s, &t).unwrap());
        cuts.push(make_rcminus(g, &fam, &s, &t).unwrap());
        cuts.push(make_rcplus(g, &fam, &s, &t).unwrap());
        cuts.push(make_gcut(g, &s, &t).unwrap());
    }
    cuts
}

fn c2_cut_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut checked, mut violations) = (0usize, Vec::new());
    for i in 0..50 {
        let inst = sweep_instance(i * 7 + 3, 5, 9);
        let g = augment(&inst);
        let covers = enumerate_feasible_covers(&inst).map_err(|e| e.to_string())?;
        let points: Vec<Vec<f64>> = covers
            .iter()
            .map(|c| incidence_vector(&g, c).unwrap())
            .collect();
        let mut cuts = constructor_cuts(&g, &mut rng);
        for level in CutLevel::VARIANTS {
            cuts.extend(
                solve(&inst, &config(level))
                    .map_err(|e| e.to_string())?
                    .pool,
            );
        }
        for cut in &cuts {
            checked += 1;
            if let Some(y) = points.iter().find(|y| cut.violation(y) > EPS) {
                violations.push(format!(
                    "instance {i}: {cut} violated by {:.3}",
                    cut.violation(y)
                ));
            }
        }
    }
    if violations.is_empty() {
        Ok(format!(
            "{checked} cuts satisfied by every enumerated feasible solution"
        ))
    } else {
        Err(format!(
            "{} violations; first: {}",
            violations.len(),
            violations[0]
        ))
    }
}

/// Fractional LP points recorded while solving small instances.
fn trace_points(count: usize, n_hi: usize, level: CutLevel) -> Vec<(Instance, Vec<f64>)> {
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let inst = sweep_instance(i, 5, n_hi);
        i += 1;
        let cfg = SolveConfig {
            cuts: level,
            record_points: 5,
            ..SolveConfig::default()
        };
        for y in solve(&inst, &cfg).unwrap().fractional_points {
            if out.len() < count {
                out.push((inst.clone(), y));
            }
        }
        assert!(i < 10_000, "not enough fractional points");
    }
    out
}

fn c3_ipc_exactness() -> Outcome {
    let points = trace_points(100, 9, CutLevel::Ipc);
    let mut violated = 0;
    for (k, (inst, y)) in points.iter().enumerate() {
        let g = augment(inst);
        let sol = FractionalSolution::new(&g, y.clone());
        let brute = brute_longest(&g, y, EPS).map(|v| v + 1.0);
        let found = separate_ipc_tc(&g, &sol, MAX_CUTS_PER_CLASS);
        let exists = brute.is_some_and(|v| v > EPS);
        if exists != !found.is_empty() {
            return Err(format!(
                "point {k}: brute {brute:?}, separation found {}",
                found.len()
            ));
        }
        if exists {
            violated += 1;
            let (path, alpha) = longest_path_dag(&g, &SupportGraph::new(&g, y, true)).unwrap();
            let ipc = make_ipc(&g, &path).unwrap();
            let best = brute.unwrap();
            if (alpha + 1.0 - best).abs() > TOL_SEPARATION
                || (ipc.violation(y) - best).abs() > TOL_SEPARATION
            {
                return Err(format!(
                    "point {k}: α+1 = {}, IPC violation {}, enumerated {best}",
                    alpha + 1.0,
                    ipc.violation(y)
                ));
            }
        }
    }
    Ok(format!(
        "100 trace points, {violated} with a violated IPC; detection and α+1 exact within {TOL_SEPARATION:e}"
    ))
}

fn c4_rc_minimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cases: Vec<(Instance, Vec<f64>)> = trace_points(60, 8, CutLevel::Rc);
    for i in 0..60 {
        let inst = sweep_instance(i * 3 + 1, 4, 8);
        let m = augment(&inst).num_arcs();
        let y = (0..m)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    rng.gen::<f64>()
                } else {
                    0.0
                }
            })
            .collect();
        cases.push((inst, y));
    }
    let mut calls = 0;
    for (k, (inst, y)) in cases.iter().enumerate() {
        let g = augment(inst);
        let fam = ArcSetFamilies::new(&g);
        let cg = ConflictGraph::new(&g);
        let sol = FractionalSolution::new(&g, y.clone());
        for mode in [MwisMode::Greedy, MwisMode::Exact] {
            let t = rc_select(&cg, &sol, mode);
            if t.is_empty() {
                continue;
            }
            for kind in [RcKind::PlusMinus, RcKind::Minus, RcKind::Plus] {
                calls += 1;
                let cand = rc_candidate(&g, &fam, &sol, &t, kind);
                let actual = common::rc_crossing(&g, &fam, &sol, &cand.s, &t, kind);
                let brute = brute_rc_min(&g, &fam, &sol, &t, kind);
                if (actual - brute).abs() > TOL_SEPARATION
                    || (cand.crossing - actual).abs() > TOL_SEPARATION
                {
                    return Err(format!(
                        "case {k} {kind:?} T={t:?}: S*={:?} crossing {actual} (reported {}), brute min {brute}",
                        cand.s, cand.crossing
                    ));
                }
                if let Some((f1, m_in, f2, m_out)) = cand.union_check {
                    if (f1 - m_in).abs() > TOL_SEPARATION || (f2 - m_out).abs() > TOL_SEPARATION {
                        return Err(format!(
                            "case {k} T={t:?}: S1*∪S2* masses ({m_in}, {m_out}) vs flows ({f1}, {f2})"
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{calls} separation calls: S* crossing equals the subset minimum and the union equalities hold within {TOL_SEPARATION:e}"
    ))
}

fn c5_transitive_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..500 {
        let n = 3 + k % 6;
        let all: Vec<(Node, Node)> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        let p = rng.gen_range(0.05..0.6);
        let mand: Vec<(Node, Node)> = all.iter().copied().filter(|_| rng.gen_bool(p)).collect();
        let inst = Instance::from_pairs(n, all, &mand).unwrap();
        let truth = enumerate_best(&inst).unwrap();
        let got = solve_transitive_path(n, &mand).unwrap();
        let agree = match &got {
            Some(paths) => truth.covered == n && paths.len() == truth.paths && paths.len() <= 2,
            None => truth.covered < n,
        };
        if !agree {
            return Err(format!(
                "n={n} Â={mand:?}: theorem {got:?}, oracle {truth:?}"
            ));
        }
    }
    Ok("500/500 mandatory subsets agree on feasibility and cover size".into())
}

fn c6_gadget() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut yes, mut total) = (0, 0);
    for _ in 0..120 {
        let q = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=6);
        let triples: Vec<(usize, usize, usize)> = (0..m)
            .map(|_| {
                (
                    rng.gen_range(1..=q),
                    rng.gen_range(1..=q),
                    rng.gen_range(1..=q),
                )
            })
            .collect();
        let expected = three_dm_brute(q, &triples);
        let got = check_fpc(&build_3dm_gadget(q, &triples).unwrap()).unwrap();
        if got != expected {
            return Err(format!(
                "q={q} M={triples:?}: gadget {got}, 3-DM {expected}"
            ));
        }
        total += 1;
        yes += usize::from(expected);
    }
    Ok(format!(
        "{total}/{total} gadgets agree with brute-force 3-DM ({yes} yes-instances)"
    ))
}

const GRID_N: [usize; 2] = [20, 30];
const GRID_P: [f64; 3] = [0.2, 0.5, 0.8];
const GRID_SEEDS: u64 = 10;

fn c7_set_a_echo() -> Outcome {
    let mut failing = Vec::new();
    let mut worst = Duration::ZERO;
    for n in GRID_N {
        for pa in GRID_P {
            for pac in GRID_P {
                let mut full = 0;
                for seed in 0..GRID_SEEDS {
                    let inst = gen_set_a(n, pa, pac, seed).unwrap();
                    let r = solve(&inst, &config(CutLevel::Ipc)).unwrap();
                    worst = worst.max(r.wall_time);
                    let optimal = matches!(
                        r.status,
                        SolveStatus::Optimal | SolveStatus::InfeasibleEmpty
                    );
                    if !optimal || r.wall_time >= TIME_CAP {
                        failing.push(format!(
                            "n={n} pa={pa} pac={pac} seed={seed}: {} in {:?}",
                            r.status, r.wall_time
                        ));
                    }
                    full += usize::from(r.covered == n);
                }
                if (full as f64) < COVER_QUOTA * GRID_SEEDS as f64 {
                    failing.push(format!(
                        "n={n} pa={pa} pac={pac}: full cover {full}/{GRID_SEEDS}"
                    ));
                }
            }
        }
    }
    if failing.is_empty() {
        Ok(format!(
            "all 18 cells optimal with ≥90% full cover; slowest {worst:.2?}"
        ))
    } else {
        Err(format!(
            "{} shortfalls (slowest {worst:.2?}): {}",
            failing.len(),
            failing.join("; ")
        ))
    }
}

fn c8_variant_ordering() -> Outcome {
    let mut checked = 0;
    for n in GRID_N {
        for pa in GRID_P {
            for pac in GRID_P {
                for seed in 0..GRID_SEEDS {
                    let inst = gen_set_a(n, pa, pac, seed).unwrap();
                    let roots: Vec<f64> = CutLevel::VARIANTS
                        .iter()
                        .map(|&level| {
                            let cfg = SolveConfig {
                                node_limit: Some(1),
                                ..config(level)
                            };
                            solve(&inst, &cfg).unwrap().root_bound
                        })
                        .collect();
                    if roots[1] < roots[0] - TOL_BOUND || roots[2] < roots[1] - TOL_BOUND {
                        return Err(format!(
                            "n={n} pa={pa} pac={pac} seed={seed}: root bounds ipc {} agrc {} rc {}",
                            roots[0], roots[1], roots[2]
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} instances: root bound rc ≥ agrc ≥ ipc within {TOL_BOUND:e}"
    ))
}

fn c9_metrics() -> Outcome {
    let g = best_gap(-8, -10).ok_or("best_gap undefined")?;
    let o = obj_gap(&[-8, -10], &[-8, -12])
        .unwrap()
        .ok_or("obj_gap undefined")?;
    let ok = (g - 20.0).abs() <= TOL_METRIC
        && (o - 100.0 / 9.0).abs() <= TOL_METRIC
        && best_gap(-8, -8) == Some(0.0)
        && best_gap(-5, 0).is_none()
        && obj_gap(&[0, 0], &[-1, 1]).unwrap().is_none();
    if ok {
        Ok(format!("best_gap {g:.9}, obj_gap {o:.9}, LB = 0 undefined"))
    } else {
        Err(format!("best_gap {g}, obj_gap {o}"))
    }
}

fn c10_f1_f2() -> Outcome {
    for i in 0..50 {
        let inst = sweep_instance(i * 11 + 5, 4, 8);
        let g = augment(&inst);
        let bc = solve(&inst, &config(CutLevel::Ipc)).unwrap();
        let m = upper_bound_m(&g).unwrap();
        if m < bc.paths.len() {
            return Err(format!(
                "instance {i}: upper_bound_m {m} < optimal path count {}",
                bc.paths.len()
            ));
        }
        let f1 = solve_f1(&g, m, 2_000_000).unwrap();
        if f1.objective != bc.objective {
            return Err(format!(
                "instance {i}: F1 {} vs F2 {}",
                f1.objective, bc.objective
            ));
        }
    }
    Ok("50/50 instances: F1 optimum equals F2 optimum, upper_bound_m ≥ optimal paths".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("cut validity sweep", c2_cut_validity),
        ("IPC separation exactness", c3_ipc_exactness),
        ("RC separation minimality", c4_rc_minimality),
        ("transitive-path conformance", c5_transitive_path),
        ("3-DM gadget", c6_gadget),
        ("set A echo (n=20,30)", c7_set_a_echo),
        ("variant root-bound ordering", c8_variant_ordering),
        ("metric formulas", c9_metrics),
        ("F1/F2 agreement", c10_f1_f2),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{secs:.1}s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
