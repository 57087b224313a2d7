//! Linear programs over boxed variables and a dense bounded dual simplex.
//!
//! Every structural variable carries finite bounds, so the all-slack basis
//! with each structural parked at the bound matching the sign of its cost is
//! dual feasible. The solver therefore only ever runs the dual simplex, which
//! also makes warm starts after row insertion or bound changes free.

use crate::cuts::CutClass;
use crate::error::SolverError;

/// Feasibility, integrality and violation tolerance.
pub const EPS: f64 = 1e-6;

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-7;
const DEGENERATE_SWITCH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    Degree,
    Flow,
    SourceLimit,
    MandatoryUse,
    Symmetry,
    Cut(CutClass),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: RowTag,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Minimize `objective · x` subject to `rows` and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub integer: Vec<bool>,
}

impl LinearProgram {
    /// `num_vars` continuous variables in `[0, 1]` with zero cost.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            lower: vec![0.0; num_vars],
            upper: vec![1.0; num_vars],
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            integer: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a row and returns its index; existing indices are unchanged.
    pub fn add_row(
        &mut self,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
        tag: RowTag,
    ) -> usize {
        self.rows.push(Row {
            terms,
            sense,
            rhs,
            tag,
        });
        self.rows.len() - 1
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x));
        let bounds = x
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Anything that can solve a [`LinearProgram`] to optimality.
pub trait LpBackend {
    fn solve(&self, lp: &LinearProgram) -> Result<LpOutcome, SolverError>;
}

/// Cold-start backend built on [`DualSimplex`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSimplex;

impl LpBackend for DenseSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpOutcome, SolverError> {
        let mut ws = DualSimplex::new(lp)?;
        Ok(match ws.solve()? {
            LpStatus::Optimal => LpOutcome::Optimal {
                objective: ws.objective(),
                x: ws.primal(),
            },
            LpStatus::Infeasible => LpOutcome::Infeasible,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
}

/// Persistent dense tableau. Rows are `a·x + s = rhs` with one slack per
/// row whose bounds encode the sense.
#[derive(Debug, Clone)]
pub struct DualSimplex {
    nstruct: usize,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    tab: Vec<Vec<f64>>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    d: Vec<f64>,
    pivots: usize,
    infeasible_row: Option<usize>,
}

fn slack_bounds(sense: Sense) -> (f64, f64) {
    match sense {
        Sense::Le => (0.0, f64::INFINITY),
        Sense::Ge => (f64::NEG_INFINITY, 0.0),
        Sense::Eq => (0.0, 0.0),
    }
}

impl DualSimplex {
    pub fn new(lp: &LinearProgram) -> Result<Self, SolverError> {
        let n = lp.num_vars();
        for j in 0..n {
            if !lp.lower[j].is_finite() || !lp.upper[j].is_finite() || lp.lower[j] > lp.upper[j] {
                return Err(SolverError::Lp(format!(
                    "variable {j} needs finite bounds with lower <= upper"
                )));
            }
        }
        let mut ws = DualSimplex {
            nstruct: n,
            cost: lp.objective.clone(),
            lower: lp.lower.clone(),
            upper: lp.upper.clone(),
            rows: Vec::new(),
            rhs: Vec::new(),
            tab: Vec::new(),
            beta: Vec::new(),
            basis: Vec::new(),
            state: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            d: lp.objective.clone(),
            pivots: 0,
            infeasible_row: None,
        };
        for j in 0..n {
            let (st, v) = if ws.cost[j] >= 0.0 {
                (VarState::Lower, ws.lower[j])
            } else {
                (VarState::Upper, ws.upper[j])
            };
            ws.state.push(st);
            ws.x.push(v);
        }
        for r in &lp.rows {
            ws.add_row(&r.terms, r.sense, r.rhs);
        }
        Ok(ws)
    }

    pub fn num_structural(&self) -> usize {
        self.nstruct
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn ncols(&self) -> usize {
        self.nstruct + self.rows.len()
    }

    /// Appends a row; its slack enters the basis so the current basis stays
    /// dual feasible.
    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) {
        for row in &mut self.tab {
            row.push(0.0);
        }
        let (lo, up) = slack_bounds(sense);
        self.cost.push(0.0);
        self.lower.push(lo);
        self.upper.push(up);
        self.d.push(0.0);
        self.state.push(VarState::Basic);
        self.x.push(0.0);

        let ncols = self.ncols() + 1;
        let mut new_row = vec![0.0; ncols];
        for &(j, a) in terms {
            new_row[j] += a;
        }
        new_row[ncols - 1] = 1.0;
        let mut b = rhs;
        for (i, &bv) in self.basis.iter().enumerate() {
            let f = new_row[bv];
            if f != 0.0 {
                for (t, &s) in new_row.iter_mut().zip(&self.tab[i]) {
                    *t -= f * s;
                }
                new_row[bv] = 0.0;
                b -= f * self.beta[i];
            }
        }
        let mut xs = b;
        for (j, &t) in new_row.iter().enumerate() {
            if t != 0.0 && self.state[j] != VarState::Basic {
                xs -= t * self.x[j];
            }
        }
        self.x[ncols - 1] = xs;
        self.rows.push(terms.to_vec());
        self.rhs.push(rhs);
        self.tab.push(new_row);
        self.beta.push(b);
        self.basis.push(ncols - 1);
    }

    /// Rows whose slack is basic and strictly inside its bounds.
    pub fn slack_rows(&self, tol: f64) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&k| {
                let c = self.nstruct + k;
                self.state[c] == VarState::Basic
                    && self.x[c] > self.lower[c] + tol
                    && self.x[c] < self.upper[c] - tol
            })
            .collect()
    }

    /// Drops rows whose slack is basic; the remaining tableau stays valid
    /// because those slack columns are unit vectors. Other rows keep their
    /// relative order.
    pub fn remove_rows(&mut self, drop: &[usize]) {
        if drop.is_empty() {
            return;
        }
        let m = self.rows.len();
        let mut dropped = vec![false; m];
        for &k in drop {
            assert!(
                self.state[self.nstruct + k] == VarState::Basic,
                "row {k} has a nonbasic slack"
            );
            dropped[k] = true;
        }
        let keep_col: Vec<bool> = (0..self.ncols())
            .map(|j| j < self.nstruct || !dropped[j - self.nstruct])
            .collect();
        let mut new_index = vec![usize::MAX; self.ncols()];
        let mut next = 0;
        for j in 0..self.ncols() {
            if keep_col[j] {
                new_index[j] = next;
                next += 1;
            }
        }
        let filter = |v: &mut Vec<f64>| {
            let mut j = 0;
            v.retain(|_| {
                j += 1;
                keep_col[j - 1]
            });
        };
        let mut tab = Vec::with_capacity(m - drop.len());
        let mut beta = Vec::with_capacity(m - drop.len());
        let mut basis = Vec::with_capacity(m - drop.len());
        for (p, mut row) in std::mem::take(&mut self.tab).into_iter().enumerate() {
            let bv = self.basis[p];
            if !keep_col[bv] {
                continue;
            }
            filter(&mut row);
            tab.push(row);
            beta.push(self.beta[p]);
            basis.push(new_index[bv]);
        }
        self.tab = tab;
        self.beta = beta;
        self.basis = basis;
        filter(&mut self.cost);
        filter(&mut self.lower);
        filter(&mut self.upper);
        filter(&mut self.x);
        filter(&mut self.d);
        let mut j = 0;
        self.state.retain(|_| {
            j += 1;
            keep_col[j - 1]
        });
        let mut k = 0;
        self.rows.retain(|_| {
            k += 1;
            !dropped[k - 1]
        });
        let mut k = 0;
        self.rhs.retain(|_| {
            k += 1;
            !dropped[k - 1]
        });
        self.infeasible_row = None;
    }

    /// Changes the bounds of a structural variable.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        assert!(j < self.nstruct && lower <= upper && lower.is_finite() && upper.is_finite());
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.state[j] != VarState::Basic {
            let st = if self.d[j] >= 0.0 {
                VarState::Lower
            } else {
                VarState::Upper
            };
            let v = if st == VarState::Lower { lower } else { upper };
            self.move_nonbasic(j, st, v);
        }
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    fn move_nonbasic(&mut self, j: usize, st: VarState, v: f64) {
        let delta = v - self.x[j];
        self.state[j] = st;
        self.x[j] = v;
        if delta != 0.0 {
            for (i, &bv) in self.basis.iter().enumerate() {
                let t = self.tab[i][j];
                if t != 0.0 {
                    self.x[bv] -= t * delta;
                }
            }
        }
    }

    /// Nonbasic structural variables as `(index, reduced cost, at upper)`.
    pub fn nonbasic_structurals(&self) -> Vec<(usize, f64, bool)> {
        (0..self.nstruct)
            .filter(|&j| self.state[j] != VarState::Basic)
            .map(|j| (j, self.d[j], self.state[j] == VarState::Upper))
            .collect()
    }

    /// Structural variable values.
    pub fn primal(&self) -> Vec<f64> {
        self.x[..self.nstruct].to_vec()
    }

    pub fn objective(&self) -> f64 {
        self.cost[..self.nstruct]
            .iter()
            .zip(&self.x)
            .map(|(c, v)| c * v)
            .sum()
    }

    fn infeasibility(&self, col: usize) -> f64 {
        let v = self.x[col];
        if v < self.lower[col] - PRIMAL_TOL {
            self.lower[col] - v
        } else if v > self.upper[col] + PRIMAL_TOL {
            v - self.upper[col]
        } else {
            0.0
        }
    }

    /// Runs the dual simplex from the current basis.
    pub fn solve(&mut self) -> Result<LpStatus, SolverError> {
        self.repair_dual();
        let mut refactored = false;
        loop {
            match self.iterate()? {
                LpStatus::Optimal => {
                    self.recompute_primal();
                    if self.residual() > RESIDUAL_TOL || self.max_infeasibility() > PRIMAL_TOL {
                        if refactored {
                            return Err(SolverError::Lp("numerical drift persists".into()));
                        }
                        self.refactor();
                        refactored = true;
                        continue;
                    }
                    return Ok(LpStatus::Optimal);
                }
                LpStatus::Infeasible => {
                    if !refactored && self.pivots > 0 && !self.certified_infeasible() {
                        self.refactor();
                        refactored = true;
                        continue;
                    }
                    return Ok(LpStatus::Infeasible);
                }
            }
        }
    }

    /// Rebuilds the failing tableau row from the original data and checks
    /// that no point inside the bounds can satisfy it.
    fn certified_infeasible(&self) -> bool {
        let Some(r) = self.infeasible_row else {
            return false;
        };
        let u = &self.tab[r][self.nstruct..];
        let mut coef = vec![0.0; self.ncols()];
        let mut b = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            if u[i] == 0.0 {
                continue;
            }
            for &(j, a) in row {
                coef[j] += u[i] * a;
            }
            coef[self.nstruct + i] += u[i];
            b += u[i] * self.rhs[i];
        }
        let (mut lo, mut hi) = (0.0, 0.0);
        for (j, &c) in coef.iter().enumerate() {
            if c.abs() <= 1e-12 {
                continue;
            }
            let (l, h) = if c > 0.0 {
                (c * self.lower[j], c * self.upper[j])
            } else {
                (c * self.upper[j], c * self.lower[j])
            };
            lo += l;
            hi += h;
        }
        let tol = RESIDUAL_TOL * (1.0 + b.abs());
        b < lo - tol || b > hi + tol
    }

    fn max_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&b| self.infeasibility(b))
            .fold(0.0, f64::max)
    }

    fn iterate(&mut self) -> Result<LpStatus, SolverError> {
        let limit = 50 * (self.ncols() + self.rows.len()) + 10_000;
        let mut degenerate = 0usize;
        for _ in 0..limit {
            let bland = degenerate >= DEGENERATE_SWITCH;
            // Leaving row: largest infeasibility, or lowest variable index once
            // degeneracy persists.
            let mut leave: Option<(usize, f64)> = None;
            for (i, &bv) in self.basis.iter().enumerate() {
                let inf = self.infeasibility(bv);
                if inf <= 0.0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if bland {
                            bv < self.basis[r]
                        } else {
                            inf > best
                        }
                    }
                };
                if better {
                    leave = Some((i, inf));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(LpStatus::Optimal);
            };
            let bv = self.basis[r];
            let to_lower = self.x[bv] < self.lower[bv];
            let target = if to_lower {
                self.lower[bv]
            } else {
                self.upper[bv]
            };

            let mut enter: Option<(usize, f64, f64)> = None;
            let row = &self.tab[r];
            for j in 0..row.len() {
                let alpha = row[j];
                if alpha.abs() <= PIVOT_TOL || self.state[j] == VarState::Basic {
                    continue;
                }
                if self.lower[j] == self.upper[j] {
                    continue;
                }
                // Moving x_j in its feasible direction must push x_bv toward target.
                let ok = match (self.state[j], to_lower) {
                    (VarState::Lower, true) => alpha < 0.0,
                    (VarState::Upper, true) => alpha > 0.0,
                    (VarState::Lower, false) => alpha > 0.0,
                    (VarState::Upper, false) => alpha < 0.0,
                    (VarState::Basic, _) => false,
                };
                if !ok {
                    continue;
                }
                let ratio = (self.d[j].abs()).max(0.0) / alpha.abs();
                let better = match enter {
                    None => true,
                    Some((_, br, ba)) => {
                        if ratio < br - DUAL_TOL {
                            true
                        } else if ratio <= br + DUAL_TOL {
                            !bland && alpha.abs() > ba * 1.0001
                        } else {
                            false
                        }
                    }
                };
                if better {
                    enter = Some((j, ratio, alpha.abs()));
                }
            }
            let Some((q, ratio, _)) = enter else {
                self.infeasible_row = Some(r);
                return Ok(LpStatus::Infeasible);
            };
            if ratio <= DUAL_TOL {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, q, target, to_lower);
        }
        Err(SolverError::Lp(
            "dual simplex iteration limit reached".into(),
        ))
    }

    fn pivot(&mut self, r: usize, q: usize, target: f64, to_lower: bool) {
        let leaving = self.basis[r];
        let alpha = self.tab[r][q];
        let delta = (self.x[leaving] - target) / alpha;
        self.x[q] += delta;
        for (i, &bv) in self.basis.iter().enumerate() {
            let t = self.tab[i][q];
            if t != 0.0 {
                self.x[bv] -= t * delta;
            }
        }
        self.x[leaving] = target;
        self.state[leaving] = if to_lower {
            VarState::Lower
        } else {
            VarState::Upper
        };

        let inv = 1.0 / alpha;
        for v in self.tab[r].iter_mut() {
            *v *= inv;
        }
        self.beta[r] *= inv;
        let pivot_row = std::mem::take(&mut self.tab[r]);
        let pivot_beta = self.beta[r];
        for i in 0..self.tab.len() {
            if i == r {
                continue;
            }
            let f = self.tab[i][q];
            if f != 0.0 {
                for (t, &p) in self.tab[i].iter_mut().zip(&pivot_row) {
                    *t -= f * p;
                }
                self.tab[i][q] = 0.0;
                self.beta[i] -= f * pivot_beta;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (dj, &p) in self.d.iter_mut().zip(&pivot_row) {
                *dj -= dq * p;
            }
        }
        self.d[q] = 0.0;
        self.tab[r] = pivot_row;
        self.tab[r][q] = 1.0;
        self.basis[r] = q;
        self.state[q] = VarState::Basic;
        self.pivots += 1;
    }

    /// Parks boxed nonbasic variables on the bound their reduced cost asks
    /// for; falls back to the slack basis if a one-sided slack is wrong.
    fn repair_dual(&mut self) {
        for j in 0..self.ncols() {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let wrong = match st {
                VarState::Lower => self.d[j] < -DUAL_TOL,
                VarState::Upper => self.d[j] > DUAL_TOL,
                VarState::Basic => false,
            };
            if !wrong {
                continue;
            }
            if self.lower[j].is_finite() && self.upper[j].is_finite() {
                let (nst, v) = if st == VarState::Lower {
                    (VarState::Upper, self.upper[j])
                } else {
                    (VarState::Lower, self.lower[j])
                };
                self.move_nonbasic(j, nst, v);
            } else {
                self.reset_to_slack_basis();
                return;
            }
        }
    }

    fn residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let lhs: f64 =
                row.iter().map(|&(j, a)| a * self.x[j]).sum::<f64>() + self.x[self.nstruct + i];
            worst = worst.max((lhs - self.rhs[i]).abs());
        }
        worst
    }

    fn recompute_primal(&mut self) {
        for i in 0..self.basis.len() {
            let mut v = self.beta[i];
            for (j, &t) in self.tab[i].iter().enumerate() {
                if t != 0.0 && self.state[j] != VarState::Basic {
                    v -= t * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    fn fresh_tableau(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let ncols = self.ncols();
        let mut tab = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut t = vec![0.0; ncols];
            for &(j, a) in row {
                t[j] += a;
            }
            t[self.nstruct + i] = 1.0;
            tab.push(t);
        }
        (tab, self.rhs.clone())
    }

    fn reset_to_slack_basis(&mut self) {
        let (tab, beta) = self.fresh_tableau();
        self.tab = tab;
        self.beta = beta;
        self.basis = (0..self.rows.len()).map(|i| self.nstruct + i).collect();
        for j in 0..self.ncols() {
            self.d[j] = self.cost[j];
        }
        for j in 0..self.nstruct {
            let (st, v) = if self.d[j] >= 0.0 {
                (VarState::Lower, self.lower[j])
            } else {
                (VarState::Upper, self.upper[j])
            };
            self.state[j] = st;
            self.x[j] = v;
        }
        for i in 0..self.rows.len() {
            self.state[self.nstruct + i] = VarState::Basic;
        }
        self.pivots = 0;
        self.recompute_primal();
    }

    /// Rebuilds the tableau for the current basis from the original rows.
    fn refactor(&mut self) {
        let (mut tab, mut beta) = self.fresh_tableau();
        let m = self.rows.len();
        let mut assigned = vec![false; m];
        let mut new_basis = vec![usize::MAX; m];
        let mut basic: Vec<usize> = self.basis.clone();
        basic.sort_unstable();
        for &q in &basic {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                if assigned[i] {
                    continue;
                }
                let v = tab[i][q].abs();
                if v > 1e-11 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
            let Some((r, _)) = best else {
                self.reset_to_slack_basis();
                return;
            };
            let inv = 1.0 / tab[r][q];
            for v in tab[r].iter_mut() {
                *v *= inv;
            }
            beta[r] *= inv;
            let pr = tab[r].clone();
            let pb = beta[r];
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = tab[i][q];
                if f != 0.0 {
                    for (t, &p) in tab[i].iter_mut().zip(&pr) {
                        *t -= f * p;
                    }
                    tab[i][q] = 0.0;
                    beta[i] -= f * pb;
                }
            }
            assigned[r] = true;
            new_basis[r] = q;
        }
        self.tab = tab;
        self.beta = beta;
        self.basis = new_basis;
        for j in 0..self.ncols() {
            let mut dj = self.cost[j];
            if self.state[j] != VarState::Basic {
                for (i, &bv) in self.basis.iter().enumerate() {
                    let c = self.cost[bv];
                    if c != 0.0 {
                        dj -= c * self.tab[i][j];
                    }
                }
            } else {
                dj = 0.0;
            }
            self.d[j] = dj;
        }
        self.pivots = 0;
        self.recompute_primal();
        self.repair_dual();
    }
}
