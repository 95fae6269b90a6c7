//! Branch-and-cut: cutting-plane loop with a fixed family order, strong
//! branching on `y_ii` then `x_e`, best-first node selection.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cuts::{self, Cut, Family, FractionalPoint, Witness};
use crate::heuristic;
use crate::instance::{Column, IncidenceVector, Instance, Solution};
use crate::lp::{build_root_lp, Basis, Limits, Side, Simplex, Status, VarStatus};

/// Integrality tolerance.
pub const INT_TOL: f64 = 1e-6;
/// Gain assigned to a strong-branching child below this is clamped up.
const SCORE_FLOOR: f64 = 1e-6;
/// Fractional nodes stop cutting when this many rounds improved the bound
/// by less than [`TAIL_EPS`] (relative).
const TAIL_ROUNDS: usize = 25;
const TAIL_EPS: f64 = 1e-5;
const MAX_TIME: f64 = 1e9;
/// Cut rows slack for this many consecutive LP solves are dropped.
const PURGE_AGE: usize = 5;
const SLACK_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("branching requested on an integral point")]
    IntegralPoint,
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    pub seed: u64,
    pub heuristic: bool,
    pub pair: bool,
    pub sec: bool,
    pub pec: bool,
    pub two_matching: bool,
    pub odd_hole: bool,
    pub ssp_sec: bool,
    /// Simplex iteration cap for each strong-branching child.
    pub strong_branching_iterations: usize,
    /// Most fractional candidates evaluated by strong branching.
    pub strong_branching_candidates: usize,
    /// Stop after this many nodes besides the root.
    pub node_limit: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            time_limit: 7200.0,
            seed: 0,
            heuristic: true,
            pair: true,
            sec: true,
            pec: true,
            two_matching: true,
            odd_hole: false,
            ssp_sec: false,
            strong_branching_iterations: 100,
            strong_branching_candidates: 10,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Optimal,
    TimeLimit,
    NodeLimit,
}

/// Cut counts use the table conventions: `pair` includes subtour cuts with
/// `|S| ≤ 2`, `sec` only `|S| > 2`, `pec` both path families.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub pair: usize,
    pub sec: usize,
    pub two_mat: usize,
    pub pec: usize,
    pub odd_hole: usize,
    pub ssp_sec: usize,
    /// Nodes processed besides the root.
    pub nodes: usize,
    pub rounds: usize,
    pub lp_iterations: usize,
    pub time_seconds: f64,
}

impl Stats {
    fn count(&mut self, cut: &Cut) {
        match &cut.witness {
            Witness::Pair { .. } => self.pair += 1,
            Witness::Sec { set, .. } if set.len() <= 2 => self.pair += 1,
            Witness::Sec { .. } => self.sec += 1,
            Witness::Pec2 { .. } | Witness::Pec { .. } => self.pec += 1,
            Witness::TwoMatch { .. } => self.two_mat += 1,
            Witness::OddHole { .. } => self.odd_hole += 1,
            Witness::SspSec { .. } => self.ssp_sec += 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub incumbent: Option<Solution>,
    pub ub: f64,
    pub lb: f64,
    pub root_lb: f64,
    pub stats: Stats,
    pub termination: Termination,
    pub time_limit: f64,
}

impl Report {
    /// Relative gap `(UB − LB) / max(1, |UB|)`.
    pub fn gap(&self) -> f64 {
        (self.ub - self.lb).max(0.0) / self.ub.abs().max(1.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeStatus {
    Open,
    FathomedBound,
    FathomedInfeasible,
    Branched,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundChange {
    pub column: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub bound: f64,
    pub changes: Vec<BoundChange>,
    pub basis: Option<WarmStart>,
    pub status: NodeStatus,
}

/// Basis snapshot that survives row removal: row statuses are keyed by a
/// stable row id, and only nonbasic rows are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub columns: Vec<VarStatus>,
    pub rows: Vec<(usize, VarStatus)>,
}

impl Node {
    pub fn new(id: usize, bound: f64) -> Self {
        Node {
            id,
            parent: None,
            bound,
            changes: Vec::new(),
            basis: None,
            status: NodeStatus::Open,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Key {
    bound: f64,
    id: usize,
}

impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    // max-heap: smallest bound, then smallest id, comes out first
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound.total_cmp(&self.bound).then(o.id.cmp(&self.id))
    }
}

/// Open nodes in best-first order (smallest bound, ties by smallest id).
#[derive(Debug, Default)]
pub struct OpenSet {
    heap: BinaryHeap<Key>,
    nodes: HashMap<usize, Node>,
}

impl OpenSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, node: Node) {
        self.heap.push(Key {
            bound: node.bound,
            id: node.id,
        });
        self.nodes.insert(node.id, node);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_bound(&self) -> Option<f64> {
        self.heap.peek().map(|k| k.bound)
    }

    /// Removes and returns the next node to process.
    pub fn pop(&mut self) -> Option<Node> {
        let k = self.heap.pop()?;
        self.nodes.remove(&k.id)
    }
}

/// Next node under best-first selection.
pub fn next_node(open: &mut OpenSet) -> Option<Node> {
    open.pop()
}

/// Branching decision with the strong-branching estimates of both children.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub column: usize,
    pub value: f64,
    /// Upper bound imposed on the down child.
    pub down_upper: f64,
    /// Lower bound imposed on the up child.
    pub up_lower: f64,
    pub down_bound: f64,
    pub up_bound: f64,
    pub score: f64,
}

fn fractionality(v: f64) -> f64 {
    let f = v - v.floor();
    f.min(1.0 - f)
}

/// Branching candidates in tiers: fractional `y_ii`, else fractional `x_e`,
/// else fractional star arcs. Sorted by column.
pub fn branch_candidates(point: &FractionalPoint) -> Vec<usize> {
    let l = point.layout();
    let v = point.values();
    let frac = |c: usize| fractionality(v[c]) > INT_TOL;
    let tiers: [Vec<usize>; 3] = [
        l.customers().map(|t| l.arc(t, t).unwrap()).filter(|&c| frac(c)).collect(),
        (0..l.n_edges()).filter(|&c| frac(c)).collect(),
        (l.n_edges()..l.len()).filter(|&c| frac(c)).collect(),
    ];
    let mut out = tiers.into_iter().find(|t| !t.is_empty()).unwrap_or_default();
    out.sort_unstable();
    out
}

/// Strong branching over the most fractional candidates. Score is the
/// product of the two child bound gains (each floored); ties go to the
/// lowest column.
pub fn select_branch_var(
    spx: &Simplex,
    point: &FractionalPoint,
    params: &Params,
    deadline: Option<Instant>,
) -> Result<Branch, SearchError> {
    let mut cands = branch_candidates(point);
    if cands.is_empty() {
        return Err(SearchError::IntegralPoint);
    }
    let v = point.values();
    if cands.len() > params.strong_branching_candidates.max(1) {
        cands.sort_by(|&a, &b| fractionality(v[b]).total_cmp(&fractionality(v[a])).then(a.cmp(&b)));
        cands.truncate(params.strong_branching_candidates.max(1));
        cands.sort_unstable();
    }
    let parent = spx.objective();
    let limits = Limits {
        max_iterations: params.strong_branching_iterations,
        deadline,
    };
    let child = |col: usize, side: Side, value: f64| -> f64 {
        let mut s = spx.clone();
        s.set_bound(col, side, value).expect("column exists");
        match s.solve(&limits) {
            Status::Infeasible => f64::INFINITY,
            _ => s.objective().max(parent),
        }
    };
    let mut best: Option<Branch> = None;
    for col in cands {
        let val = v[col];
        let (down_upper, up_lower) = (val.floor(), val.ceil());
        let down_bound = child(col, Side::Upper, down_upper);
        let up_bound = child(col, Side::Lower, up_lower);
        let score = (down_bound - parent).max(SCORE_FLOOR) * (up_bound - parent).max(SCORE_FLOOR);
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(Branch {
                column: col,
                value: val,
                down_upper,
                up_lower,
                down_bound,
                up_bound,
                score,
            });
        }
    }
    Ok(best.unwrap())
}

/// One separation round: the first family in the fixed order that yields
/// cuts outside `pool`, most violated first and capped per family. Families
/// needed for feasibility are always separated at integral points.
pub fn separation_round(
    point: &FractionalPoint,
    params: &Params,
    integral: bool,
    pool: &HashSet<Witness>,
) -> Vec<Cut> {
    let p = params;
    let plan: [(bool, &[Family], usize); 6] = [
        (p.pair || integral, &[Family::Pair], usize::MAX),
        (p.sec || integral, &[Family::Sec], cuts::SEC_CAP),
        (p.pec || integral, &[Family::Pec2, Family::Pec], cuts::PEC_CAP),
        (p.two_matching, &[Family::TwoMatch], cuts::TWO_MATCH_CAP),
        (p.odd_hole, &[Family::OddHole], cuts::SEC_CAP),
        (p.ssp_sec, &[Family::SspSec], cuts::SEC_CAP),
    ];
    for (on, fams, cap) in plan {
        if !on {
            continue;
        }
        let mut found: Vec<Cut> = fams
            .iter()
            .flat_map(|&f| cuts::separate(point, f))
            .filter(|c| !pool.contains(&c.witness))
            .collect();
        if found.is_empty() {
            continue;
        }
        cuts::sort_cuts(&mut found);
        found.truncate(cap);
        return found;
    }
    Vec::new()
}

enum Outcome {
    Done,
    TimedOut(f64),
    Branch(f64, Branch),
}

struct Solver<'a> {
    inst: &'a Instance,
    params: &'a Params,
    deadline: Instant,
    incumbent: Solution,
    ub: f64,
    pool: HashSet<Witness>,
    /// Per LP row: stable id, the cut it came from (none for model rows) and
    /// how many consecutive solves it has been slack.
    rows: Vec<RowInfo>,
    next_row_id: usize,
    stats: Stats,
    rng: ChaCha8Rng,
    root_lb: f64,
}

struct RowInfo {
    id: usize,
    cut: Option<Witness>,
    idle: usize,
}

fn fathom_level(ub: f64) -> f64 {
    ub - 1e-6 * ub.abs().max(1.0)
}

impl Solver<'_> {
    fn offer(&mut self, sol: Solution) {
        if !sol.is_feasible(self.inst) {
            return;
        }
        let c = sol.cost(self.inst);
        if c < self.ub - 1e-9 {
            log::debug!("incumbent {:.6} -> {:.6}", self.ub, c);
            self.ub = c;
            self.incumbent = sol;
        }
    }

    fn process(&mut self, spx: &mut Simplex, node: &Node) -> Result<Outcome, SearchError> {
        let root = node.id == 0;
        let layout = self.inst.layout();
        let mut lb = node.bound;
        let mut history: Vec<f64> = Vec::new();
        let mut round = 0usize;
        loop {
            if Instant::now() >= self.deadline {
                return Ok(Outcome::TimedOut(lb));
            }
            let before = spx.iterations();
            let status = spx.solve(&Limits {
                max_iterations: 5_000_000,
                deadline: Some(self.deadline),
            });
            self.stats.lp_iterations += spx.iterations() - before;
            match status {
                Status::Optimal => {}
                Status::Infeasible if !root => return Ok(Outcome::Done),
                Status::IterationLimit if Instant::now() >= self.deadline => {
                    return Ok(Outcome::TimedOut(lb));
                }
                other => {
                    return Err(SearchError::Internal(format!(
                        "node {} LP ended with status {other:?}",
                        node.id
                    )))
                }
            }
            let obj = spx.objective();
            lb = lb.max(obj);
            if root {
                self.root_lb = obj;
            }
            if obj >= fathom_level(self.ub) {
                return Ok(Outcome::Done);
            }
            let point = FractionalPoint::new(layout, spx.primal().to_vec());
            if root && self.params.heuristic && round.is_multiple_of(3) {
                let sol = heuristic::lp_heuristic(self.inst, &point, &mut self.rng);
                let sol = heuristic::improve(self.inst, &sol);
                self.offer(sol);
                if obj >= fathom_level(self.ub) {
                    return Ok(Outcome::Done);
                }
            }
            let integral = point.is_integral(INT_TOL);
            history.push(obj);
            let tailing = !integral
                && history.len() > TAIL_ROUNDS
                && obj - history[history.len() - 1 - TAIL_ROUNDS] < TAIL_EPS * obj.abs().max(1.0);
            let found = if tailing { Vec::new() } else { separation_round(&point, self.params, integral, &self.pool) };
            if !found.is_empty() {
                self.purge(spx);
                self.add_cuts(spx, found)?;
                round += 1;
                self.stats.rounds += 1;
                continue;
            }
            if integral {
                let values = point.values().iter().map(|v| v.round() as i8).collect();
                let v = IncidenceVector::new(layout, values);
                let sol = Solution::from_incidence(&v, Some(self.inst)).map_err(|viol| {
                    SearchError::Internal(format!("integral LP point is infeasible: {viol:?}"))
                })?;
                self.offer(sol);
                return Ok(Outcome::Done);
            }
            let branch = select_branch_var(spx, &point, self.params, Some(self.deadline))?;
            return Ok(Outcome::Branch(lb, branch));
        }
    }

    fn add_cuts(&mut self, spx: &mut Simplex, found: Vec<Cut>) -> Result<(), SearchError> {
        let mut rows = Vec::with_capacity(found.len());
        for c in found {
            self.stats.count(&c);
            self.pool.insert(c.witness.clone());
            self.rows.push(RowInfo {
                id: self.next_row_id,
                cut: Some(c.witness),
                idle: 0,
            });
            self.next_row_id += 1;
            rows.push(c.row);
        }
        spx.add_rows(rows).map_err(|e| SearchError::Internal(e.to_string()))
    }

    /// Ages cut rows at the current optimum and drops the ones slack for
    /// too long. Their cuts may be separated again later.
    fn purge(&mut self, spx: &mut Simplex) {
        let mut stale = Vec::new();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if r.cut.is_none() {
                continue;
            }
            if spx.row_is_basic(i) && spx.row_slack(i) > SLACK_TOL {
                r.idle += 1;
                if r.idle >= PURGE_AGE {
                    stale.push(i);
                }
            } else {
                r.idle = 0;
            }
        }
        if stale.is_empty() {
            return;
        }
        let removed = spx.remove_rows(&stale);
        let mut drop = vec![false; self.rows.len()];
        for &i in &removed {
            drop[i] = true;
            if let Some(w) = &self.rows[i].cut {
                self.pool.remove(w);
            }
        }
        let mut k = 0;
        self.rows.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
    }

    fn warm_start(&self, spx: &Simplex) -> WarmStart {
        let b = spx.basis();
        WarmStart {
            columns: b.columns,
            rows: b
                .rows
                .iter()
                .enumerate()
                .filter(|(_, st)| **st != VarStatus::Basic)
                .map(|(i, &st)| (self.rows[i].id, st))
                .collect(),
        }
    }

    fn load_warm_start(&self, spx: &mut Simplex, ws: &WarmStart) {
        let index: HashMap<usize, usize> = self.rows.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
        let mut rows = vec![VarStatus::Basic; self.rows.len()];
        for &(id, st) in &ws.rows {
            if let Some(&i) = index.get(&id) {
                rows[i] = st;
            }
        }
        spx.load_basis(&Basis {
            columns: ws.columns.clone(),
            rows,
        });
    }

    fn log_progress(&self, id: usize, lb: f64) {
        let s = &self.stats;
        log::info!(
            "node={id} lb={lb:.4} ub={:.4} gap={:.4}% cuts={}/{}/{}/{}",
            self.ub,
            100.0 * (self.ub - lb).max(0.0) / self.ub.abs().max(1.0),
            s.pair,
            s.sec,
            s.pec,
            s.two_mat
        );
    }
}

/// Solves `inst` to optimality or until a limit is hit.
pub fn branch_and_cut(inst: &Instance, params: &Params) -> Result<Report, SearchError> {
    let start = Instant::now();
    let deadline = start + Duration::from_secs_f64(params.time_limit.clamp(0.0, MAX_TIME));
    let root_lp = build_root_lp(inst);
    let root_bounds: Vec<(f64, f64)> = root_lp.columns().iter().map(|c| (c.lower, c.upper)).collect();
    let mut spx = Simplex::new(root_lp);
    let incumbent = Solution::all_to_nearest_depot(inst);
    let mut s = Solver {
        inst,
        params,
        deadline,
        ub: incumbent.cost(inst),
        incumbent,
        pool: HashSet::new(),
        rows: (0..spx.n_rows())
            .map(|id| RowInfo {
                id,
                cut: None,
                idle: 0,
            })
            .collect(),
        next_row_id: spx.n_rows(),
        stats: Stats::default(),
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        root_lb: 0.0,
    };
    let mut open = OpenSet::new();
    open.push(Node::new(0, 0.0));
    let mut applied: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut next_id = 1;
    let mut stopped: Option<Termination> = None;
    while let Some(mut node) = next_node(&mut open) {
        if node.bound >= fathom_level(s.ub) {
            // every open bound is at least as large
            open = OpenSet::new();
            break;
        }
        if Instant::now() >= deadline {
            open.push(node);
            stopped = Some(Termination::TimeLimit);
            break;
        }
        if node.id != 0 && params.node_limit.is_some_and(|n| s.stats.nodes >= n) {
            open.push(node);
            stopped = Some(Termination::NodeLimit);
            break;
        }

        let mut target: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for ch in &node.changes {
            target.insert(ch.column, (ch.lower, ch.upper));
        }
        let touched: Vec<usize> = applied.keys().chain(target.keys()).copied().collect();
        for col in touched {
            let want = target.get(&col).copied().unwrap_or(root_bounds[col]);
            let have = applied.get(&col).copied().unwrap_or(root_bounds[col]);
            if want != have {
                spx.set_bound(col, Side::Lower, want.0).expect("column exists");
                spx.set_bound(col, Side::Upper, want.1).expect("column exists");
            }
        }
        applied = target;
        if let Some(ws) = &node.basis {
            s.load_warm_start(&mut spx, ws);
        }

        let outcome = s.process(&mut spx, &node)?;
        if node.id != 0 {
            s.stats.nodes += 1;
        }
        match outcome {
            Outcome::Done => {
                s.log_progress(node.id, open.min_bound().unwrap_or(s.ub).min(s.ub));
            }
            Outcome::TimedOut(lb) => {
                node.bound = lb;
                open.push(node);
                stopped = Some(Termination::TimeLimit);
                break;
            }
            Outcome::Branch(lb, br) => {
                let (lo, hi) = applied.get(&br.column).copied().unwrap_or(root_bounds[br.column]);
                let basis = s.warm_start(&spx);
                for (bound, ch) in [
                    (br.down_bound, BoundChange { column: br.column, lower: lo, upper: br.down_upper }),
                    (br.up_bound, BoundChange { column: br.column, lower: br.up_lower, upper: hi }),
                ] {
                    let mut changes = node.changes.clone();
                    changes.push(ch);
                    open.push(Node {
                        id: next_id,
                        parent: Some(node.id),
                        bound: lb.max(bound),
                        changes,
                        basis: Some(basis.clone()),
                        status: NodeStatus::Open,
                    });
                    next_id += 1;
                }
                s.log_progress(node.id, open.min_bound().unwrap_or(lb));
            }
        }
    }
    let (termination, lb) = match stopped {
        None => (Termination::Optimal, s.ub),
        Some(t) => (t, open.min_bound().unwrap_or(s.ub).min(s.ub)),
    };
    s.stats.time_seconds = start.elapsed().as_secs_f64();
    let root_lb = s.root_lb.min(s.ub);
    Ok(Report {
        name: inst.name().to_string(),
        incumbent: Some(s.incumbent),
        ub: s.ub,
        lb,
        root_lb,
        stats: s.stats,
        termination,
        time_limit: params.time_limit,
    })
}

/// Column label for logs: `x[a,b]` or `y[i,j]`.
pub fn column_name(inst: &Instance, col: usize) -> String {
    match inst.layout().column(col) {
        Column::Edge(a, b) => format!("x[{a},{b}]"),
        Column::Arc(i, j) => format!("y[{i},{j}]"),
    }
}
