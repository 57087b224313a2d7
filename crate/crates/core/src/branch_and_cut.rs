//! Best-bound branch-and-cut over the single-commodity arc formulation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::cuts::{make_tc1, make_tic, Cut, CutClass};
use crate::error::SolverError;
use crate::families::ArcSetFamilies;
use crate::formulation::{build_f2_relaxation, evaluate_cover, FractionalSolution};
use crate::graph::{augment, is_feasible_path, AugmentedGraph, Instance, Path};
use crate::lp::{DualSimplex, LpStatus, EPS};
use crate::separation::{
    separate_agrc, separate_ipc_tc, separate_rc, separate_tic, ConflictGraph, MwisMode, RcKind,
    MAX_CUTS_PER_CLASS,
};

/// Highest user-cut class enabled. Each level includes the ones before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum CutLevel {
    /// Only the lazy IPC/TIC layer.
    None,
    #[default]
    Ipc,
    Agrc,
    Rc,
}

impl CutLevel {
    pub const VARIANTS: [CutLevel; 3] = [CutLevel::Ipc, CutLevel::Agrc, CutLevel::Rc];

    pub fn name(self) -> &'static str {
        match self {
            CutLevel::None => "none",
            CutLevel::Ipc => "ipc",
            CutLevel::Agrc => "agrc",
            CutLevel::Rc => "rc",
        }
    }
}

impl fmt::Display for CutLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutLevel {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(CutLevel::None),
            "ipc" => Ok(CutLevel::Ipc),
            "agrc" => Ok(CutLevel::Agrc),
            "rc" => Ok(CutLevel::Rc),
            other => Err(SolverError::InvalidArgument(format!(
                "unknown cut level {other:?}"
            ))),
        }
    }
}

impl FromStr for MwisMode {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(MwisMode::Greedy),
            "exact" => Ok(MwisMode::Exact),
            other => Err(SolverError::InvalidArgument(format!(
                "unknown mwis mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub time_limit: Option<Duration>,
    pub cuts: CutLevel,
    pub mwis: MwisMode,
    pub max_rounds: usize,
    pub max_cuts_per_class: usize,
    pub node_limit: Option<usize>,
    /// Recorded for reproducibility; the search itself is deterministic.
    pub seed: u64,
    /// How many fractional LP points to keep in the report.
    pub record_points: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            time_limit: None,
            cuts: CutLevel::Ipc,
            mwis: MwisMode::Greedy,
            max_rounds: 10,
            max_cuts_per_class: MAX_CUTS_PER_CLASS,
            node_limit: None,
            seed: 0,
            record_points: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Stopped at the node limit with an incumbent.
    Feasible,
    /// Proven optimal and the optimum uses no path.
    InfeasibleEmpty,
    Timeout,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::InfeasibleEmpty => "infeasible-empty",
            SolveStatus::Timeout => "timeout",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CutCount {
    pub lazy: usize,
    pub user: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub paths: Vec<Path>,
    pub covered: usize,
    /// Incumbent value `W`.
    pub objective: i64,
    /// Best proven lower bound on `W`.
    pub bound: i64,
    /// LP value at the root after its cut rounds.
    pub root_bound: f64,
    pub cut_counts: BTreeMap<CutClass, CutCount>,
    pub tree_nodes: usize,
    /// Child nodes whose LP value fell below the parent's by more than `EPS`.
    pub bound_regressions: usize,
    pub wall_time: Duration,
    pub separation_time: Duration,
    /// Every distinct cut generated, in insertion order.
    pub pool: Vec<Cut>,
    /// Fractional LP points met during the search, up to the configured cap.
    pub fractional_points: Vec<Vec<f64>>,
}

impl SolveReport {
    pub fn total_cuts(&self) -> usize {
        self.cut_counts.values().map(|c| c.lazy + c.user).sum()
    }

    /// `key=value` lines.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("status", self.status.to_string());
        kv("paths", self.paths.len().to_string());
        kv("nodes", self.covered.to_string());
        kv("objective", self.objective.to_string());
        kv("bound", self.bound.to_string());
        kv("root_bound", format!("{:.6}", self.root_bound));
        kv("#cuts", self.total_cuts().to_string());
        for class in CutClass::ALL {
            let c = self.cut_counts.get(&class).copied().unwrap_or_default();
            kv(&format!("cuts.{class}.lazy"), c.lazy.to_string());
            kv(&format!("cuts.{class}.user"), c.user.to_string());
        }
        kv("tree-nodes", self.tree_nodes.to_string());
        kv("t(s)", format!("{:.3}", self.wall_time.as_secs_f64()));
        kv(
            "t_sep(s)",
            format!("{:.3}", self.separation_time.as_secs_f64()),
        );
        for (i, p) in self.paths.iter().enumerate() {
            let nodes: Vec<String> = p.nodes.iter().map(|v| v.to_string()).collect();
            kv(&format!("path.{}", i + 1), nodes.join(" "));
        }
        out
    }
}

/// `|(z − LB)/LB|·100`, undefined when `LB = 0`.
pub fn best_gap(z_best: i64, lb: i64) -> Option<f64> {
    (lb != 0).then(|| ((z_best - lb) as f64 / lb as f64).abs() * 100.0)
}

/// `|Σobjs − Σbests| / |Σobjs|·100`, undefined when `Σobjs = 0`.
pub fn obj_gap(objs: &[i64], bests: &[i64]) -> Result<Option<f64>, SolverError> {
    if objs.len() != bests.len() {
        return Err(SolverError::InvalidArgument(format!(
            "obj_gap needs equal lengths, got {} and {}",
            objs.len(),
            bests.len()
        )));
    }
    let so: i64 = objs.iter().sum();
    let sb: i64 = bests.iter().sum();
    Ok((so != 0).then(|| ((so - sb) as f64).abs() / (so as f64).abs() * 100.0))
}

/// Splits an integral flow into its `0 ⇝ n̄` paths with source and sink
/// stripped.
pub fn decompose_integral(g: &AugmentedGraph, y: &[f64]) -> Result<Vec<Path>, SolverError> {
    let bad = |msg: String| SolverError::NotDecomposable(msg);
    let mut used = vec![false; g.num_arcs()];
    let unit = |a: usize| {
        let v = y[a];
        if (v - 1.0).abs() <= EPS {
            Ok(true)
        } else if v.abs() <= EPS {
            Ok(false)
        } else {
            Err(bad(format!("arc {a} carries {v}")))
        }
    };
    for a in 0..g.num_arcs() {
        unit(a)?;
    }
    let mut seen = vec![false; g.num_nodes()];
    let mut paths = Vec::new();
    for &a0 in g.out_arcs(0) {
        if !unit(a0)? {
            continue;
        }
        used[a0] = true;
        let mut nodes = Vec::new();
        let mut cur = g.arc(a0).1;
        while cur != g.sink() {
            if seen[cur] {
                return Err(bad(format!("node {cur} visited twice")));
            }
            seen[cur] = true;
            nodes.push(cur);
            let mut next = None;
            for &a in g.out_arcs(cur) {
                if unit(a)? {
                    if next.is_some() {
                        return Err(bad(format!("node {cur} has two outgoing units")));
                    }
                    next = Some(a);
                }
            }
            let a = next.ok_or_else(|| bad(format!("flow stops at node {cur}")))?;
            used[a] = true;
            cur = g.arc(a).1;
        }
        if nodes.is_empty() {
            return Err(bad("empty path".into()));
        }
        paths.push(Path::new(nodes));
    }
    if let Some(a) = (0..g.num_arcs()).find(|&a| !used[a] && unit(a).unwrap_or(true)) {
        return Err(bad(format!("arc {a} is not on any source path")));
    }
    Ok(paths)
}

#[derive(Debug)]
struct OpenNode {
    bound: f64,
    id: usize,
    depth: usize,
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
    // Max-heap: smallest rounded bound first, then the newest node.
    fn cmp(&self, other: &Self) -> Ordering {
        rounded(other.bound)
            .cmp(&rounded(self.bound))
            .then(self.id.cmp(&other.id))
    }
}

/// Slack above which a cut row counts as non-binding.
const PURGE_SLACK: f64 = 1e-6;

fn rounded(bound: f64) -> i64 {
    (bound - EPS).ceil() as i64
}

enum NodeOutcome {
    Pruned,
    /// Branching arc, LP value and fixings implied by reduced costs.
    Branch(usize, f64, Vec<(usize, f64)>),
}

struct Solver<'a> {
    g: &'a AugmentedGraph,
    cfg: &'a SolveConfig,
    fam: Option<ArcSetFamilies>,
    cg: Option<ConflictGraph>,
    lp: DualSimplex,
    pool: Vec<Cut>,
    pool_index: HashMap<u64, Vec<usize>>,
    in_lp: Vec<bool>,
    /// Pool index of each LP row; `None` for the formulation rows.
    lp_rows: Vec<Option<usize>>,
    counts: BTreeMap<CutClass, CutCount>,
    tic_added: bool,
    incumbent: i64,
    best_paths: Vec<Path>,
    start: Instant,
    sep_time: Duration,
    points: Vec<Vec<f64>>,
}

impl Solver<'_> {
    fn timed_out(&self) -> bool {
        self.cfg
            .time_limit
            .is_some_and(|t| self.start.elapsed() >= t)
    }

    fn activate(&mut self, idx: usize) {
        let cut = &self.pool[idx];
        self.lp.add_row(&cut.row_terms(), cut.sense, cut.rhs as f64);
        self.lp_rows.push(Some(idx));
        self.in_lp[idx] = true;
    }

    /// Pools and activates a new cut. A cut already pooled is only
    /// re-activated when it left the LP.
    fn add_cut(&mut self, cut: Cut, lazy: bool) -> bool {
        let h = cut.canonical_hash();
        let bucket = self.pool_index.entry(h).or_default();
        if let Some(&i) = bucket.iter().find(|&&i| self.pool[i].same_inequality(&cut)) {
            if self.in_lp[i] {
                return false;
            }
            self.activate(i);
            return true;
        }
        bucket.push(self.pool.len());
        self.pool.push(cut);
        self.in_lp.push(false);
        self.activate(self.pool.len() - 1);
        let cut = self.pool.last().unwrap();
        let c = self.counts.entry(cut.class).or_default();
        if lazy {
            c.lazy += 1;
        } else {
            c.user += 1;
        }
        if cut.class == CutClass::Tic {
            self.tic_added = true;
        }
        true
    }

    /// Re-activates pooled cuts violated by `y`.
    fn pool_check(&mut self, y: &[f64]) -> usize {
        let violated: Vec<usize> = (0..self.pool.len())
            .filter(|&i| !self.in_lp[i] && self.pool[i].violation(y) > EPS)
            .collect();
        for &i in &violated {
            self.activate(i);
        }
        violated.len()
    }

    /// Moves non-binding cuts out of the LP; they stay pooled.
    fn purge(&mut self) {
        let drop: Vec<usize> = self
            .lp
            .slack_rows(PURGE_SLACK)
            .into_iter()
            .filter(|&k| self.lp_rows[k].is_some_and(|i| self.pool[i].class != CutClass::Tic))
            .collect();
        if drop.is_empty() {
            return;
        }
        for &k in &drop {
            let i = self.lp_rows[k].unwrap();
            self.in_lp[i] = false;
        }
        self.lp.remove_rows(&drop);
        let mut k = 0;
        self.lp_rows.retain(|_| {
            k += 1;
            !drop.contains(&(k - 1))
        });
    }

    fn solution(&self) -> FractionalSolution {
        let y = self
            .lp
            .primal()
            .into_iter()
            .map(|v| if v.abs() <= 1e-9 { 0.0 } else { v })
            .collect();
        FractionalSolution::new(self.g, y)
    }

    /// Lazy check of an integral point; `Ok(None)` means the cover is feasible.
    fn lazy_rows(&mut self, sol: &FractionalSolution) -> Result<Option<usize>, SolverError> {
        let paths = decompose_integral(self.g, &sol.y)?;
        let mut added = 0;
        for p in &paths {
            if !is_feasible_path(self.g.instance(), p)? {
                let cut = make_tc1(self.g, &p.to_augmented(self.g.n()))?;
                added += usize::from(self.add_cut(cut, true));
            }
        }
        if !self.tic_added {
            if let Some(cut) = separate_tic(self.g, sol) {
                added += usize::from(self.add_cut(cut, true));
            }
        }
        if added > 0 {
            return Ok(Some(added));
        }
        let w = evaluate_cover(&paths, self.g.n())?;
        if w < self.incumbent {
            self.incumbent = w;
            self.best_paths = paths;
        }
        Ok(None)
    }

    fn separate(&mut self, sol: &FractionalSolution) -> usize {
        let t0 = Instant::now();
        let cap = self.cfg.max_cuts_per_class;
        let mut found: Vec<Cut> = Vec::new();
        if !self.tic_added {
            found.extend(separate_tic(self.g, sol));
        }
        if self.cfg.cuts >= CutLevel::Ipc {
            found.extend(separate_ipc_tc(self.g, sol, cap));
        }
        let (fam, cg) = (self.fam.as_ref(), self.cg.as_ref());
        if found.is_empty() && self.cfg.cuts >= CutLevel::Agrc {
            found.extend(separate_agrc(
                self.g,
                fam.unwrap(),
                cg.unwrap(),
                sol,
                self.cfg.mwis,
            ));
        }
        if self.cfg.cuts >= CutLevel::Rc {
            for kind in [RcKind::PlusMinus, RcKind::Minus, RcKind::Plus] {
                if !found.is_empty() {
                    break;
                }
                found.extend(separate_rc(
                    self.g,
                    fam.unwrap(),
                    cg.unwrap(),
                    sol,
                    kind,
                    self.cfg.mwis,
                ));
            }
        }
        self.sep_time += t0.elapsed();
        let mut added = 0;
        for cut in found {
            let lazy = cut.class == CutClass::Tic;
            added += usize::from(self.add_cut(cut, lazy));
        }
        added
    }

    /// Arcs whose move off their bound would lift the LP value to the
    /// incumbent; the subtree can keep them where they are.
    fn reduced_cost_fixings(&self, obj: f64) -> Vec<(usize, f64)> {
        self.lp
            .nonbasic_structurals()
            .into_iter()
            .filter(|&(j, _, _)| {
                let (lo, up) = self.lp.bounds(j);
                lo < up
            })
            .filter_map(|(j, d, at_upper)| {
                if !at_upper && d > 0.0 && rounded(obj + d) >= self.incumbent {
                    Some((j, 0.0))
                } else if at_upper && d < 0.0 && rounded(obj - d) >= self.incumbent {
                    Some((j, 1.0))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Solves the LP under the current fixings, running cut rounds.
    fn process(
        &mut self,
        is_root: bool,
        root_bound: &mut f64,
    ) -> Result<(NodeOutcome, f64), SolverError> {
        let mut rounds = 0;
        loop {
            if self.lp.solve()? == LpStatus::Infeasible {
                return Ok((NodeOutcome::Pruned, f64::INFINITY));
            }
            let obj = self.lp.objective();
            if is_root {
                *root_bound = obj;
            }
            if rounded(obj) >= self.incumbent {
                return Ok((NodeOutcome::Pruned, obj));
            }
            let sol = self.solution();
            if self.pool_check(&sol.y) > 0 {
                continue;
            }
            if sol.is_integral() {
                if self.lazy_rows(&sol)?.is_some() {
                    continue;
                }
                return Ok((NodeOutcome::Pruned, obj));
            }
            if self.points.len() < self.cfg.record_points {
                self.points.push(sol.y.clone());
            }
            if rounds < self.cfg.max_rounds && !self.timed_out() {
                rounds += 1;
                if self.separate(&sol) > 0 {
                    continue;
                }
            }
            let j = (0..sol.y.len())
                .filter(|&a| (sol.y[a] - sol.y[a].round()).abs() > EPS)
                .min_by(|&a, &b| {
                    (sol.y[a] - 0.5)
                        .abs()
                        .total_cmp(&(sol.y[b] - 0.5).abs())
                        .then(a.cmp(&b))
                })
                .expect("fractional point has a fractional arc");
            let implied = self.reduced_cost_fixings(obj);
            return Ok((NodeOutcome::Branch(j, obj, implied), obj));
        }
    }
}

/// Maximizes covered nodes, then minimizes the path count.
pub fn solve(inst: &Instance, cfg: &SolveConfig) -> Result<SolveReport, SolverError> {
    let start = Instant::now();
    let g = augment(inst);
    solve_augmented(&g, cfg, start)
}

fn solve_augmented(
    g: &AugmentedGraph,
    cfg: &SolveConfig,
    start: Instant,
) -> Result<SolveReport, SolverError> {
    let lp = DualSimplex::new(&build_f2_relaxation(g))?;
    let needs_sets = cfg.cuts >= CutLevel::Agrc;
    let mut s = Solver {
        g,
        cfg,
        fam: needs_sets.then(|| ArcSetFamilies::new(g)),
        cg: needs_sets.then(|| ConflictGraph::new(g)),
        lp,
        pool: Vec::new(),
        pool_index: HashMap::new(),
        in_lp: Vec::new(),
        lp_rows: vec![None; 2 * g.n()],
        counts: BTreeMap::new(),
        tic_added: false,
        incumbent: 0,
        best_paths: Vec::new(),
        start,
        sep_time: Duration::ZERO,
        points: Vec::new(),
    };
    // Without mandatory arcs no path is feasible; the TIC settles this at once.
    if g.instance().num_mandatory() == 0 {
        s.add_cut(make_tic(g), true);
    }

    let mut heap = BinaryHeap::new();
    heap.push(OpenNode {
        bound: f64::NEG_INFINITY,
        id: 0,
        depth: 0,
        fixings: Vec::new(),
    });
    let mut next_id = 1;
    let mut explored = 0;
    let mut current: Vec<(usize, f64)> = Vec::new();
    let mut root_bound = f64::NEG_INFINITY;
    let mut stopped: Option<SolveStatus> = None;
    let mut regressions = 0;

    while let Some(node) = heap.peek() {
        if rounded(node.bound) >= s.incumbent {
            heap.pop();
            continue;
        }
        if s.timed_out() {
            stopped = Some(SolveStatus::Timeout);
            break;
        }
        if cfg.node_limit.is_some_and(|l| explored >= l) {
            stopped = Some(SolveStatus::Feasible);
            break;
        }
        let node = heap.pop().unwrap();
        if explored > 0 {
            s.purge();
        }
        explored += 1;
        for &(j, _) in &current {
            s.lp.set_bounds(j, 0.0, 1.0);
        }
        for &(j, v) in &node.fixings {
            s.lp.set_bounds(j, v, v);
        }
        current.clone_from(&node.fixings);
        let (outcome, obj) = s.process(node.id == 0, &mut root_bound)?;
        if node.id != 0 && obj < node.bound - EPS {
            regressions += 1;
        }
        if let NodeOutcome::Branch(j, obj, implied) = outcome {
            for v in [0.0, 1.0] {
                let mut fixings = node.fixings.clone();
                fixings.extend(&implied);
                fixings.push((j, v));
                heap.push(OpenNode {
                    bound: obj,
                    id: next_id,
                    depth: node.depth + 1,
                    fixings,
                });
                next_id += 1;
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| rounded(n.bound))
        .min()
        .unwrap_or(i64::MAX);
    let bound = open_bound.min(s.incumbent);
    let status = match stopped {
        Some(st) => st,
        None if s.best_paths.is_empty() => SolveStatus::InfeasibleEmpty,
        None => SolveStatus::Optimal,
    };
    if root_bound == f64::NEG_INFINITY {
        root_bound = bound as f64;
    }
    let covered = s.best_paths.iter().map(|p| p.len()).sum();
    Ok(SolveReport {
        status,
        covered,
        objective: s.incumbent,
        bound,
        root_bound,
        cut_counts: s.counts,
        tree_nodes: explored,
        bound_regressions: regressions,
        wall_time: start.elapsed(),
        separation_time: s.sep_time,
        pool: s.pool,
        fractional_points: s.points,
        paths: s.best_paths,
    })
}
