//! Bounded dual simplex over `[A | -I]` with one logical per row and a dense
//! explicit basis inverse, updated in product form and refactored
//! periodically. Dual steepest-edge pricing, Harris ratio test, and a
//! Bland fallback when the dual objective stalls.

use std::time::Instant;

use super::{Basis, LpModel, LpSolution, Row, Sense, Side, Status, VarStatus, FEAS_TOL, OPT_TOL};

const PRIMAL_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-9;
const BLAND_AFTER: usize = 5000;
const REFACTOR_EVERY: usize = 100;
const ARTIFICIAL_BOUND: f64 = 1e7;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_iterations: 1_000_000,
            deadline: None,
        }
    }
}

impl Limits {
    pub fn iterations(max_iterations: usize) -> Self {
        Limits {
            max_iterations,
            deadline: None,
        }
    }
}

/// Stateful solver keeping its factorization between calls, so adding rows
/// or changing bounds re-solves from the previous basis.
#[derive(Debug, Clone)]
pub struct Simplex {
    model: LpModel,
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    status: Vec<VarStatus>,
    artificial: Vec<bool>,
    head: Vec<usize>,
    pos: Vec<usize>,
    binv: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    w: Vec<f64>,
    factored: bool,
    since_refactor: usize,
    iterations: usize,
    last: Status,
}

fn retain_mask<T>(v: &mut Vec<T>, keep: &[bool]) {
    let mut k = 0;
    v.retain(|_| {
        k += 1;
        keep[k - 1]
    });
}

fn logical_bounds(row: &Row) -> (f64, f64) {
    match row.sense {
        Sense::Le => (f64::NEG_INFINITY, row.rhs),
        Sense::Ge => (row.rhs, f64::INFINITY),
        Sense::Eq => (row.rhs, row.rhs),
    }
}

impl Simplex {
    /// Starts from the all-logical basis, or from the model's hint if any.
    pub fn new(model: LpModel) -> Self {
        let n = model.n_columns();
        let m = model.n_rows();
        let mut cols = vec![Vec::new(); n];
        for (i, r) in model.rows().iter().enumerate() {
            for &(c, a) in &r.coefs {
                cols[c].push((i, a));
            }
        }
        let mut lower: Vec<f64> = model.columns().iter().map(|c| c.lower).collect();
        let mut upper: Vec<f64> = model.columns().iter().map(|c| c.upper).collect();
        for r in model.rows() {
            let (l, u) = logical_bounds(r);
            lower.push(l);
            upper.push(u);
        }
        let hint = model.hint().cloned();
        let mut s = Simplex {
            model,
            n,
            m,
            cols,
            lower,
            upper,
            status: vec![VarStatus::Basic; n + m],
            artificial: vec![false; n + m],
            head: (n..n + m).collect(),
            pos: vec![NONE; n + m],
            binv: Vec::new(),
            x: vec![0.0; n + m],
            d: vec![0.0; n + m],
            w: vec![1.0; m],
            factored: false,
            since_refactor: 0,
            iterations: 0,
            last: Status::IterationLimit,
        };
        for j in 0..n {
            s.set_nonbasic(j, VarStatus::AtLower);
        }
        match hint {
            Some(b) => s.load_basis(&b),
            None => s.slack_factor(),
        }
        s
    }

    pub fn model(&self) -> &LpModel {
        &self.model
    }

    pub fn n_rows(&self) -> usize {
        self.m
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn status(&self) -> Status {
        self.last
    }

    fn slack_factor(&mut self) {
        let (n, m) = (self.n, self.m);
        self.head = (n..n + m).collect();
        self.pos = vec![NONE; n + m];
        for (p, &v) in self.head.iter().enumerate() {
            self.pos[v] = p;
            self.status[v] = VarStatus::Basic;
        }
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = -1.0;
        }
        self.w = vec![1.0; m];
        self.factored = true;
        self.since_refactor = 0;
    }

    fn is_free(&self, v: usize) -> bool {
        self.lower[v] == f64::NEG_INFINITY && self.upper[v] == f64::INFINITY
    }

    fn is_fixed(&self, v: usize) -> bool {
        self.lower[v] == self.upper[v]
    }

    /// Places `v` nonbasic at the requested side, falling back to the finite
    /// side (or zero for free variables).
    fn set_nonbasic(&mut self, v: usize, side: VarStatus) {
        let (l, u) = (self.lower[v], self.upper[v]);
        let (st, val) = match side {
            VarStatus::AtUpper if u.is_finite() => (VarStatus::AtUpper, u),
            _ if l.is_finite() => (VarStatus::AtLower, l),
            _ if u.is_finite() => (VarStatus::AtUpper, u),
            _ => (VarStatus::AtLower, 0.0),
        };
        self.status[v] = st;
        self.x[v] = val;
        self.artificial[v] = false;
    }

    fn col_of(&self, v: usize) -> ColIter<'_> {
        if v < self.n {
            ColIter::Structural(self.cols[v].iter())
        } else {
            ColIter::Logical(Some(v - self.n))
        }
    }

    pub fn basis(&self) -> Basis {
        Basis {
            columns: self.status[..self.n].to_vec(),
            rows: self.status[self.n..].to_vec(),
        }
    }

    /// Installs a basis. Rows beyond the hint get basic logicals; a hint
    /// with a different column count is ignored.
    pub fn load_basis(&mut self, b: &Basis) {
        if b.columns.len() != self.n {
            return;
        }
        for (j, &st) in b.columns.iter().enumerate() {
            match st {
                VarStatus::Basic => {
                    self.status[j] = VarStatus::Basic;
                    self.artificial[j] = false;
                }
                side => self.set_nonbasic(j, side),
            }
        }
        for i in 0..self.m {
            let v = self.n + i;
            match b.rows.get(i).copied().unwrap_or(VarStatus::Basic) {
                VarStatus::Basic => {
                    self.status[v] = VarStatus::Basic;
                    self.artificial[v] = false;
                }
                side => self.set_nonbasic(v, side),
            }
        }
        self.factored = false;
    }

    pub fn set_bound(&mut self, column: usize, side: Side, value: f64) -> Result<(), super::LpError> {
        self.model.set_bound(column, side, value)?;
        match side {
            Side::Lower => self.lower[column] = value,
            Side::Upper => self.upper[column] = value,
        }
        if self.status[column] != VarStatus::Basic {
            let st = self.status[column];
            self.set_nonbasic(column, st);
        }
        Ok(())
    }

    /// Appends rows; their logicals enter the basis so the current basis
    /// stays factored.
    pub fn add_rows(&mut self, rows: Vec<Row>) -> Result<(), super::LpError> {
        if rows.is_empty() {
            return Ok(());
        }
        for r in &rows {
            self.model.add_row(r.clone())?;
        }
        let (n, m0, k) = (self.n, self.m, rows.len());
        let m1 = m0 + k;
        for (t, r) in rows.iter().enumerate() {
            for &(c, a) in &r.coefs {
                self.cols[c].push((m0 + t, a));
            }
            let (l, u) = logical_bounds(r);
            self.lower.push(l);
            self.upper.push(u);
            self.status.push(VarStatus::Basic);
            self.artificial.push(false);
            self.pos.push(NONE);
            self.x.push(r.activity(&self.x[..n]));
            self.d.push(0.0);
        }
        self.m = m1;
        if !self.factored {
            return Ok(());
        }
        let mut binv = vec![0.0; m1 * m1];
        for p in 0..m0 {
            binv[p * m1..p * m1 + m0].copy_from_slice(&self.binv[p * m0..(p + 1) * m0]);
        }
        for (t, r) in rows.iter().enumerate() {
            let p = m0 + t;
            let row = &mut binv[p * m1..(p + 1) * m1];
            for &(c, a) in &r.coefs {
                let q = self.pos[c];
                if q != NONE {
                    let src = &self.binv[q * m0..(q + 1) * m0];
                    for (dst, s) in row[..m0].iter_mut().zip(src) {
                        *dst += a * s;
                    }
                }
            }
            row[p] = -1.0;
            self.head.push(n + p);
            self.pos[n + p] = p;
            self.w.push(row.iter().map(|v| v * v).sum());
        }
        self.binv = binv;
        Ok(())
    }

    /// Whether row `i` currently has its logical in the basis, i.e. the row
    /// can be removed without refactoring.
    pub fn row_is_basic(&self, i: usize) -> bool {
        self.status[self.n + i] == VarStatus::Basic
    }

    /// Slack of row `i` at the current point (nonnegative when satisfied).
    pub fn row_slack(&self, i: usize) -> f64 {
        let v = self.n + i;
        let act = self.x[v];
        (act - self.lower[v]).min(self.upper[v] - act)
    }

    /// Deletes rows whose logical is basic; later rows shift down. Rows with
    /// a nonbasic logical are kept. Returns the rows actually removed.
    ///
    /// With the logical of row `i` basic at position `p`, the remaining
    /// basis inverse is the old one with row `p` and column `i` deleted.
    pub fn remove_rows(&mut self, rows: &[usize]) -> Vec<usize> {
        let (n, m0) = (self.n, self.m);
        let mut drop = vec![false; m0];
        for &i in rows {
            if i < m0 && self.status[n + i] == VarStatus::Basic {
                drop[i] = true;
            }
        }
        let removed: Vec<usize> = (0..m0).filter(|&i| drop[i]).collect();
        if removed.is_empty() {
            return removed;
        }
        self.model.remove_rows(&removed);
        let mut new_row = vec![NONE; m0];
        let mut k = 0;
        for i in 0..m0 {
            if !drop[i] {
                new_row[i] = k;
                k += 1;
            }
        }
        let m1 = k;
        for col in &mut self.cols {
            col.retain(|&(i, _)| !drop[i]);
            for e in col.iter_mut() {
                e.0 = new_row[e.0];
            }
        }
        let keep_var = |v: usize| v < n || !drop[v - n];
        let keep: Vec<bool> = (0..n + m0).map(keep_var).collect();
        retain_mask(&mut self.lower, &keep);
        retain_mask(&mut self.upper, &keep);
        retain_mask(&mut self.status, &keep);
        retain_mask(&mut self.artificial, &keep);
        retain_mask(&mut self.x, &keep);
        retain_mask(&mut self.d, &keep);
        let remap = |v: usize| if v < n { v } else { n + new_row[v - n] };
        if self.factored {
            let old_head = std::mem::take(&mut self.head);
            let mut binv = Vec::with_capacity(m1 * m1);
            let mut w = Vec::with_capacity(m1);
            for (p, &v) in old_head.iter().enumerate() {
                if !keep_var(v) {
                    continue;
                }
                let src = &self.binv[p * m0..(p + 1) * m0];
                let start = binv.len();
                binv.extend((0..m0).filter(|&i| !drop[i]).map(|i| src[i]));
                w.push(binv[start..].iter().map(|e| e * e).sum());
                self.head.push(remap(v));
            }
            self.binv = binv;
            self.w = w;
            self.pos = vec![NONE; n + m1];
            for (p, &v) in self.head.iter().enumerate() {
                self.pos[v] = p;
            }
        } else {
            self.head = self.head.iter().filter(|&&v| keep_var(v)).map(|&v| remap(v)).collect();
            self.pos = vec![NONE; n + m1];
            for (p, &v) in self.head.iter().enumerate() {
                self.pos[v] = p;
            }
            self.w = vec![1.0; m1];
        }
        self.m = m1;
        removed
    }

    /// Rebuilds the basis inverse from the current statuses. Dependent or
    /// surplus structurals leave the basis and uncovered rows get their
    /// logical, so any status vector yields a nonsingular basis.
    fn refactor(&mut self) {
        let (n, m) = (self.n, self.m);
        let structurals: Vec<usize> = (0..n).filter(|&j| self.status[j] == VarStatus::Basic).collect();
        let mut row_idx = vec![NONE; m];
        let mut open_rows = Vec::new();
        for i in 0..m {
            if self.status[n + i] != VarStatus::Basic {
                row_idx[i] = open_rows.len();
                open_rows.push(i);
            }
        }
        let kr = open_rows.len();
        let ks = structurals.len();
        let mut c = vec![0.0; kr * ks];
        for (s, &j) in structurals.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                if row_idx[i] != NONE {
                    c[row_idx[i] * ks + s] = a;
                }
            }
        }
        let mut aug = vec![0.0; kr * kr];
        for r in 0..kr {
            aug[r * kr + r] = 1.0;
        }
        let mut used = vec![false; kr];
        let mut pivot_of = vec![NONE; ks];
        for s in 0..ks {
            let mut best = NONE;
            let mut best_val = SINGULAR_TOL;
            for r in 0..kr {
                if !used[r] && c[r * ks + s].abs() > best_val {
                    best_val = c[r * ks + s].abs();
                    best = r;
                }
            }
            if best == NONE {
                continue;
            }
            used[best] = true;
            pivot_of[s] = best;
            let inv = 1.0 / c[best * ks + s];
            for v in &mut c[best * ks..(best + 1) * ks] {
                *v *= inv;
            }
            for v in &mut aug[best * kr..(best + 1) * kr] {
                *v *= inv;
            }
            let prow_c = c[best * ks..(best + 1) * ks].to_vec();
            let prow_a = aug[best * kr..(best + 1) * kr].to_vec();
            for r in 0..kr {
                if r == best {
                    continue;
                }
                let f = c[r * ks + s];
                if f == 0.0 {
                    continue;
                }
                for (v, p) in c[r * ks..(r + 1) * ks].iter_mut().zip(&prow_c) {
                    *v -= f * p;
                }
                for (v, p) in aug[r * kr..(r + 1) * kr].iter_mut().zip(&prow_a) {
                    *v -= f * p;
                }
            }
        }
        // drop dependent structurals, cover unpivoted rows with logicals
        let mut kept = Vec::new();
        for (s, &j) in structurals.iter().enumerate() {
            if pivot_of[s] == NONE {
                let side = if self.x[j] >= self.upper[j] { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.set_nonbasic(j, side);
            } else {
                kept.push((j, pivot_of[s]));
            }
        }
        for (r, &i) in open_rows.iter().enumerate() {
            if !used[r] {
                self.status[n + i] = VarStatus::Basic;
                self.artificial[n + i] = false;
            }
        }

        self.head.clear();
        self.pos = vec![NONE; n + m];
        self.binv = vec![0.0; m * m];
        for &(j, r) in &kept {
            let p = self.head.len();
            self.head.push(j);
            self.pos[j] = p;
            let row = &mut self.binv[p * m..(p + 1) * m];
            for (rr, &i) in open_rows.iter().enumerate() {
                if used[rr] {
                    row[i] = aug[r * kr + rr];
                }
            }
        }
        for i in 0..m {
            if self.status[n + i] != VarStatus::Basic {
                continue;
            }
            let p = self.head.len();
            self.head.push(n + i);
            self.pos[n + i] = p;
            let mut row = vec![0.0; m];
            for &(j, a) in &self.model.rows()[i].coefs {
                let q = self.pos[j];
                if q != NONE && j < n {
                    for (dst, s) in row.iter_mut().zip(&self.binv[q * m..(q + 1) * m]) {
                        *dst += a * s;
                    }
                }
            }
            row[i] -= 1.0;
            self.binv[p * m..(p + 1) * m].copy_from_slice(&row);
        }
        debug_assert_eq!(self.head.len(), m);
        self.w = (0..m)
            .map(|p| self.binv[p * m..(p + 1) * m].iter().map(|v| v * v).sum::<f64>().max(1e-12))
            .collect();
        self.factored = true;
        self.since_refactor = 0;
    }

    fn recompute_primal(&mut self) {
        let (n, m) = (self.n, self.m);
        let mut rhs = vec![0.0; m];
        for v in 0..n + m {
            if self.status[v] == VarStatus::Basic || self.x[v] == 0.0 {
                continue;
            }
            let val = self.x[v];
            for (i, a) in self.col_of(v) {
                rhs[i] -= a * val;
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            self.x[self.head[p]] = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        }
    }

    fn cost(&self, v: usize) -> f64 {
        if v < self.n {
            self.model.columns()[v].objective
        } else {
            0.0
        }
    }

    fn recompute_duals(&mut self) {
        let (n, m) = (self.n, self.m);
        let mut pi = vec![0.0; m];
        for p in 0..m {
            let c = self.cost(self.head[p]);
            if c != 0.0 {
                for (dst, b) in pi.iter_mut().zip(&self.binv[p * m..(p + 1) * m]) {
                    *dst += c * b;
                }
            }
        }
        for v in 0..n + m {
            self.d[v] = if self.status[v] == VarStatus::Basic {
                0.0
            } else {
                let dot: f64 = self.col_of(v).map(|(i, a)| a * pi[i]).sum();
                self.cost(v) - dot
            };
        }
    }

    /// Flips boxed nonbasics with wrong-signed reduced costs; unboxed ones
    /// get an artificial bound. Returns whether any value moved.
    fn make_dual_feasible(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.n + self.m {
            if self.status[v] == VarStatus::Basic || self.is_fixed(v) {
                continue;
            }
            let d = self.d[v];
            let free = self.is_free(v);
            let wants_up = d < -OPT_TOL && (free || self.status[v] == VarStatus::AtLower);
            let wants_down = d > OPT_TOL && (free || self.status[v] == VarStatus::AtUpper);
            if wants_up {
                if self.upper[v].is_finite() {
                    self.status[v] = VarStatus::AtUpper;
                    self.x[v] = self.upper[v];
                    self.artificial[v] = false;
                } else {
                    self.status[v] = VarStatus::AtUpper;
                    self.x[v] = self.lower[v].max(-ARTIFICIAL_BOUND).max(0.0) + ARTIFICIAL_BOUND;
                    self.artificial[v] = true;
                }
                changed = true;
            } else if wants_down {
                if self.lower[v].is_finite() {
                    self.status[v] = VarStatus::AtLower;
                    self.x[v] = self.lower[v];
                    self.artificial[v] = false;
                } else {
                    self.status[v] = VarStatus::AtLower;
                    self.x[v] = self.upper[v].min(ARTIFICIAL_BOUND).min(0.0) - ARTIFICIAL_BOUND;
                    self.artificial[v] = true;
                }
                changed = true;
            }
        }
        changed
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lower[v] - PRIMAL_TOL {
            self.lower[v] - x
        } else if x > self.upper[v] + PRIMAL_TOL {
            x - self.upper[v]
        } else {
            0.0
        }
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best = None;
        let mut best_score = 0.0;
        let mut best_var = NONE;
        for p in 0..self.m {
            let v = self.head[p];
            let inf = self.infeasibility(v);
            if inf <= 0.0 {
                continue;
            }
            if bland {
                if v < best_var {
                    best_var = v;
                    best = Some(p);
                }
            } else {
                let score = inf * inf / self.w[p];
                if score > best_score {
                    best_score = score;
                    best = Some(p);
                }
            }
        }
        best
    }

    fn refresh(&mut self) {
        self.refactor();
        self.recompute_duals();
        self.make_dual_feasible();
        self.recompute_primal();
    }

    pub fn solve(&mut self, limits: &Limits) -> Status {
        self.last = self.run(limits);
        self.last
    }

    fn run(&mut self, limits: &Limits) -> Status {
        let (n, m) = (self.n, self.m);
        if (0..n + m).any(|v| self.lower[v] > self.upper[v] + PRIMAL_TOL) {
            return Status::Infeasible;
        }
        if self.factored {
            self.recompute_duals();
            self.make_dual_feasible();
            self.recompute_primal();
        } else {
            self.refresh();
        }
        let start = self.iterations;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut retried = false;
        let mut rho = vec![0.0; m];
        let mut alpha_r = vec![0.0; n + m];
        let mut alpha_c = vec![0.0; m];
        loop {
            if self.iterations - start >= limits.max_iterations {
                return Status::IterationLimit;
            }
            if let Some(dl) = limits.deadline {
                if (self.iterations - start).is_multiple_of(16) && Instant::now() >= dl {
                    return Status::IterationLimit;
                }
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refresh();
            }
            let Some(p) = self.choose_leaving(bland) else {
                if self.since_refactor > 0 {
                    self.refresh();
                    if self.choose_leaving(bland).is_some() {
                        continue;
                    }
                }
                return self.finish();
            };
            let lv = self.head[p];
            let to_lower = self.x[lv] < self.lower[lv];
            let target = if to_lower { self.lower[lv] } else { self.upper[lv] };
            let s = if to_lower { 1.0 } else { -1.0 };
            rho.copy_from_slice(&self.binv[p * m..(p + 1) * m]);

            // pricing: row p of B^-1 N and dual ratio test
            let mut theta_max = f64::INFINITY;
            let mut candidates: Vec<(usize, f64)> = Vec::new();
            for v in 0..n + m {
                if self.status[v] == VarStatus::Basic {
                    alpha_r[v] = 0.0;
                    continue;
                }
                let a: f64 = if v < n {
                    self.cols[v].iter().map(|&(i, c)| c * rho[i]).sum()
                } else {
                    -rho[v - n]
                };
                alpha_r[v] = a;
                if self.is_fixed(v) || a.abs() <= PIVOT_TOL {
                    continue;
                }
                let eligible = if self.is_free(v) {
                    true
                } else {
                    match self.status[v] {
                        VarStatus::AtLower => a * s < 0.0,
                        VarStatus::AtUpper => a * s > 0.0,
                        VarStatus::Basic => false,
                    }
                };
                if !eligible {
                    continue;
                }
                let dj = if self.is_free(v) {
                    self.d[v].abs()
                } else if self.status[v] == VarStatus::AtLower {
                    self.d[v]
                } else {
                    -self.d[v]
                };
                if !bland {
                    theta_max = theta_max.min((dj.max(0.0) + OPT_TOL) / a.abs());
                }
                candidates.push((v, dj.max(0.0) / a.abs()));
            }
            let entering = if bland {
                let min = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                candidates
                    .iter()
                    .filter(|c| c.1 <= min + 1e-12)
                    .map(|c| c.0)
                    .min()
            } else {
                let mut best: Option<usize> = None;
                for &(v, ratio) in &candidates {
                    if ratio <= theta_max {
                        match best {
                            Some(b) if alpha_r[b].abs() >= alpha_r[v].abs() => {}
                            _ => best = Some(v),
                        }
                    }
                }
                best
            };
            let Some(q) = entering else {
                if self.since_refactor > 0 && !retried {
                    retried = true;
                    self.refresh();
                    continue;
                }
                return Status::Infeasible;
            };
            retried = false;

            alpha_c.iter_mut().for_each(|v| *v = 0.0);
            for (i, a) in self.col_of(q) {
                for (k, dst) in alpha_c.iter_mut().enumerate() {
                    *dst += self.binv[k * m + i] * a;
                }
            }
            let piv = alpha_c[p];
            if (piv - alpha_r[q]).abs() > 1e-6 * (1.0 + piv.abs()) || piv.abs() <= PIVOT_TOL {
                if self.since_refactor > 0 {
                    self.refresh();
                    continue;
                }
                if piv.abs() <= PIVOT_TOL {
                    return Status::IterationLimit;
                }
            }

            // dual update
            let mut dq = self.d[q];
            let ok_sign = if self.is_free(q) {
                true
            } else if self.status[q] == VarStatus::AtLower {
                dq >= 0.0
            } else {
                dq <= 0.0
            };
            if !ok_sign {
                dq = 0.0;
            }
            let theta_d = dq / alpha_r[q];
            if theta_d != 0.0 {
                for v in 0..n + m {
                    if self.status[v] != VarStatus::Basic && alpha_r[v] != 0.0 {
                        self.d[v] -= theta_d * alpha_r[v];
                    }
                }
            }
            self.d[lv] = -theta_d;
            self.d[q] = 0.0;

            // primal update
            let theta_p = (self.x[lv] - target) / piv;
            for k in 0..m {
                if alpha_c[k] != 0.0 {
                    let hv = self.head[k];
                    self.x[hv] -= theta_p * alpha_c[k];
                }
            }
            self.x[q] += theta_p;
            self.x[lv] = target;

            // basis inverse and steepest-edge weights
            let inv = 1.0 / piv;
            for v in &mut self.binv[p * m..(p + 1) * m] {
                *v *= inv;
            }
            let prow = self.binv[p * m..(p + 1) * m].to_vec();
            for k in 0..m {
                let f = alpha_c[k];
                if k == p || f == 0.0 {
                    continue;
                }
                let row = &mut self.binv[k * m..(k + 1) * m];
                let mut norm = 0.0;
                for (dst, pv) in row.iter_mut().zip(&prow) {
                    *dst -= f * pv;
                    norm += *dst * *dst;
                }
                self.w[k] = norm.max(1e-12);
            }
            self.w[p] = prow.iter().map(|v| v * v).sum::<f64>().max(1e-12);

            self.status[lv] = if to_lower { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.artificial[lv] = false;
            self.pos[lv] = NONE;
            self.status[q] = VarStatus::Basic;
            self.artificial[q] = false;
            self.head[p] = q;
            self.pos[q] = p;
            self.iterations += 1;
            self.since_refactor += 1;

            if theta_d.abs() < 1e-12 {
                degenerate += 1;
                if degenerate > BLAND_AFTER {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
        }
    }

    fn finish(&self) -> Status {
        let n = self.n;
        for v in 0..n + self.m {
            if self.status[v] != VarStatus::Basic && self.artificial[v] && self.d[v].abs() > OPT_TOL {
                return Status::Unbounded;
            }
        }
        if self.model.max_violation(&self.x[..n]) > FEAS_TOL {
            return Status::IterationLimit;
        }
        Status::Optimal
    }

    pub fn primal(&self) -> &[f64] {
        &self.x[..self.n]
    }

    /// Objective of the current basic solution; a lower bound whenever the
    /// basis is dual feasible.
    pub fn objective(&self) -> f64 {
        self.model.objective_value(&self.x[..self.n])
    }

    pub fn solution(&self) -> LpSolution {
        LpSolution {
            status: self.last,
            objective: self.objective(),
            primal: self.x[..self.n].to_vec(),
            basis: self.basis(),
            iterations: self.iterations,
        }
    }
}

enum ColIter<'a> {
    Structural(std::slice::Iter<'a, (usize, f64)>),
    Logical(Option<usize>),
}

impl Iterator for ColIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColIter::Structural(it) => it.next().copied(),
            ColIter::Logical(row) => row.take().map(|i| (i, -1.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{solve, LpModel, Row, Sense, Side, Status};
    use super::*;

    type TestRow<'a> = (&'a [(usize, f64)], Sense, f64);

    fn model(cols: &[(f64, f64, f64)], rows: &[TestRow]) -> LpModel {
        let mut m = LpModel::new();
        for &(c, l, u) in cols {
            m.add_column(c, l, u);
        }
        for (coefs, s, r) in rows {
            m.add_row(Row::new(coefs.to_vec(), *s, *r)).unwrap();
        }
        m
    }

    #[test]
    fn single_row_minimum() {
        let m = model(&[(1.0, 0.0, 10.0)], &[(&[(0, 1.0)], Sense::Ge, 1.0)]);
        let s = solve(&m, None);
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows() {
        let m = model(
            &[(1.0, 0.0, 10.0)],
            &[(&[(0, 1.0)], Sense::Ge, 1.0), (&[(0, 1.0)], Sense::Le, 0.0)],
        );
        assert_eq!(solve(&m, None).status, Status::Infeasible);
    }

    #[test]
    fn face_optimum() {
        let m = model(
            &[(-1.0, 0.0, 1.0), (-1.0, 0.0, 1.0)],
            &[(&[(0, 1.0), (1, 1.0)], Sense::Le, 1.0)],
        );
        let s = solve(&m, None);
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_ray() {
        let m = model(&[(-1.0, 0.0, f64::INFINITY)], &[(&[(0, 1.0)], Sense::Ge, 0.0)]);
        assert_eq!(solve(&m, None).status, Status::Unbounded);
    }

    #[test]
    fn free_variable() {
        // min x s.t. x >= -3, x free
        let m = model(
            &[(1.0, f64::NEG_INFINITY, f64::INFINITY)],
            &[(&[(0, 1.0)], Sense::Ge, -3.0)],
        );
        let s = solve(&m, None);
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let m = model(&[(1.0, 0.0, 1.0)], &[]);
        let mut spx = Simplex::new(m);
        spx.set_bound(0, Side::Lower, 2.0).unwrap();
        assert_eq!(spx.solve(&Limits::default()), Status::Infeasible);
    }

    #[test]
    fn warm_rows_and_bounds() {
        // min -x - 2y, x + y <= 4, x <= 3, y <= 2 (bounds)
        let m = model(
            &[(-1.0, 0.0, 3.0), (-2.0, 0.0, 2.0)],
            &[(&[(0, 1.0), (1, 1.0)], Sense::Le, 4.0)],
        );
        let mut spx = Simplex::new(m);
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!((spx.objective() + 6.0).abs() < 1e-9);
        let before = spx.iterations();
        spx.add_rows(vec![Row::new(vec![(0, 1.0), (1, 2.0)], Sense::Le, 4.0)])
            .unwrap();
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!((spx.objective() + 4.0).abs() < 1e-9, "{}", spx.objective());
        assert!(spx.iterations() - before <= 2);
        spx.set_bound(1, Side::Upper, 0.5).unwrap();
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!((spx.objective() + 4.0).abs() < 1e-9, "{}", spx.objective());
        spx.set_bound(0, Side::Upper, 1.0).unwrap();
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!((spx.objective() + 2.0).abs() < 1e-9);
    }

    #[test]
    fn removing_slack_rows_keeps_the_optimum() {
        // min -x - y, x + y <= 3, x <= 10 (slack), y <= 10 (slack), bounds [0, 2]
        let m = model(
            &[(-1.0, 0.0, 2.0), (-1.0, 0.0, 2.0)],
            &[
                (&[(0, 1.0)], Sense::Le, 10.0),
                (&[(0, 1.0), (1, 1.0)], Sense::Le, 3.0),
                (&[(1, 1.0)], Sense::Le, 10.0),
            ],
        );
        let mut spx = Simplex::new(m);
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!(spx.row_is_basic(0) && spx.row_is_basic(2));
        assert!(!spx.row_is_basic(1));
        assert_eq!(spx.remove_rows(&[0, 1, 2]), vec![0, 2]);
        assert_eq!(spx.n_rows(), 1);
        assert_eq!(spx.model().n_rows(), 1);
        let before = spx.iterations();
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert_eq!(spx.iterations(), before);
        assert!((spx.objective() + 3.0).abs() < 1e-9);
        spx.add_rows(vec![Row::new(vec![(0, 1.0)], Sense::Le, 0.5)]).unwrap();
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!((spx.objective() + 2.5).abs() < 1e-9);
    }

    #[test]
    fn hint_from_model() {
        let m = model(
            &[(1.0, 0.0, 5.0), (1.0, 0.0, 5.0)],
            &[(&[(0, 1.0), (1, 1.0)], Sense::Ge, 3.0), (&[(0, 1.0), (1, -1.0)], Sense::Eq, 1.0)],
        );
        let s = solve(&m, None);
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        let again = solve(&m, Some(&s.basis));
        assert_eq!(again.status, Status::Optimal);
        assert_eq!(again.iterations, 0);
        assert!((again.objective - 3.0).abs() < 1e-9);
    }
}
