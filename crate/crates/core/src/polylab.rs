//! Enumeration lab for tiny instances: all feasible incidence vectors,
//! exact affine rank, dimension, validity and facet checks, and a
//! brute-force optimum used as a test oracle.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cuts::{sec_delta_row, sec_gamma_row, Witness};
use crate::instance::{
    generate_instance, ClassTag, CostModel, IncidenceVector, Instance, Layout, Ring, Solution,
};
use crate::lp::{Row, Sense};
use crate::search::{branch_and_cut, Params, Termination};

/// Enumeration limits.
pub const MAX_CUSTOMERS: usize = 6;
pub const MAX_DEPOTS: usize = 3;
/// Largest instance accepted by [`brute_force_opt`].
pub const ORACLE_MAX_CUSTOMERS: usize = 8;

/// Cap on the optimal solutions compared when breaking cost ties.
const TIE_CAP: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum PolylabError {
    #[error("size limit exceeded: u={u}, n={n}")]
    TooLarge { u: usize, n: usize },
    #[error("need at least one customer and one depot")]
    Empty,
    #[error("{0}")]
    Invalid(String),
}

fn check_size(u: usize, n: usize, max_u: usize) -> Result<(), PolylabError> {
    if u == 0 || n == 0 {
        return Err(PolylabError::Empty);
    }
    if u > max_u || n > MAX_DEPOTS {
        return Err(PolylabError::TooLarge { u, n });
    }
    Ok(())
}

struct Enumerator<'a> {
    l: Layout,
    buf: Vec<i8>,
    two_paths: bool,
    visit: &'a mut dyn FnMut(&[i8]) -> ControlFlow<()>,
    stop: bool,
}

fn permutations(items: &[usize], out: &mut Vec<Vec<usize>>) {
    fn rec(cur: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        for idx in 0..left.len() {
            let v = left.remove(idx);
            cur.push(v);
            rec(cur, left, out);
            cur.pop();
            left.insert(idx, v);
        }
    }
    rec(&mut Vec::new(), &mut items.to_vec(), out);
}

/// Distinct cycles through a depot and the customers of `block`, as
/// customer orders with the first smaller than the last.
fn block_tours(block: &[usize]) -> Vec<Vec<usize>> {
    if block.len() == 1 {
        return vec![block.to_vec()];
    }
    let mut all = Vec::new();
    permutations(block, &mut all);
    all.retain(|p| p[0] < p[p.len() - 1]);
    all
}

impl Enumerator<'_> {
    fn add_x(&mut self, a: usize, b: usize, v: i8) {
        let c = self.l.edge(a, b).unwrap();
        self.buf[c] += v;
    }

    fn set_y(&mut self, i: usize, j: usize, v: i8) {
        let c = self.l.arc(i, j).unwrap();
        self.buf[c] = v;
    }

    fn tour_edges(&mut self, d: usize, tour: &[usize], sign: i8) {
        if tour.len() == 1 {
            self.add_x(d, tour[0], 2 * sign);
            return;
        }
        self.add_x(d, tour[0], sign);
        for w in tour.windows(2) {
            self.add_x(w[0], w[1], sign);
        }
        self.add_x(tour[tour.len() - 1], d, sign);
    }

    fn run(&mut self) {
        let u = self.l.n_customers();
        for d in self.l.depots() {
            self.set_y(d, d, 1);
        }
        for mask in 0u32..(1 << u) {
            let ring: Vec<usize> = (0..u).filter(|&t| mask >> t & 1 == 1).collect();
            for &t in &ring {
                self.set_y(t, t, 1);
            }
            self.rings(mask, &ring);
            for &t in &ring {
                self.set_y(t, t, 0);
            }
            if self.stop {
                return;
            }
        }
    }

    fn rings(&mut self, rem: u32, ring: &[usize]) {
        if self.stop {
            return;
        }
        if rem == 0 {
            let u = self.l.n_customers();
            let stars: Vec<usize> = (0..u).filter(|t| !ring.contains(t)).collect();
            self.stars(&stars, ring);
            return;
        }
        let first = rem.trailing_zeros();
        let rest = rem & !(1 << first);
        // every subset of `rest`, joined with `first`
        let mut sub = rest;
        loop {
            let block_mask = sub | (1 << first);
            let block: Vec<usize> = (0..32).filter(|&t| block_mask >> t & 1 == 1).collect();
            let tours = block_tours(&block);
            for d in self.l.depots() {
                for tour in &tours {
                    self.tour_edges(d, tour, 1);
                    self.rings(rem & !block_mask, ring);
                    self.tour_edges(d, tour, -1);
                }
            }
            if self.two_paths && block.len() == 1 {
                let t = block[0];
                for d1 in self.l.depots() {
                    for d2 in d1 + 1..self.l.n_vertices() {
                        self.add_x(d1, t, 1);
                        self.add_x(d2, t, 1);
                        self.rings(rem & !block_mask, ring);
                        self.add_x(d1, t, -1);
                        self.add_x(d2, t, -1);
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    fn stars(&mut self, stars: &[usize], ring: &[usize]) {
        if self.stop {
            return;
        }
        let Some((&t, rest)) = stars.split_first() else {
            if (self.visit)(&self.buf).is_break() {
                self.stop = true;
            }
            return;
        };
        let targets: Vec<usize> = ring.iter().copied().chain(self.l.depots()).collect();
        for k in targets {
            self.set_y(t, k, 1);
            self.stars(rest, ring);
            self.set_y(t, k, 0);
        }
    }
}

/// Streams every feasible incidence vector for `u` customers and `n`
/// depots: rings (several per depot allowed, degenerate rings included,
/// one vector per distinct edge set) plus star assignments to ring
/// customers or depots. With `two_paths`, depot–customer–depot paths are
/// also produced. The visitor may stop the enumeration early.
pub fn for_each_feasible(
    u: usize,
    n: usize,
    two_paths: bool,
    visit: &mut dyn FnMut(&[i8]) -> ControlFlow<()>,
) -> Result<(), PolylabError> {
    check_size(u, n, MAX_CUSTOMERS)?;
    let l = Layout::new(u, n);
    let mut e = Enumerator {
        l,
        buf: vec![0; l.len()],
        two_paths,
        visit,
        stop: false,
    };
    e.run();
    Ok(())
}

/// All feasible incidence vectors of a `(u, n)` instance, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeSample {
    pub u: usize,
    pub n: usize,
    pub m: usize,
    pub vectors: Vec<IncidenceVector>,
}

pub fn enumerate_feasible(u: usize, n: usize) -> Result<PolytopeSample, PolylabError> {
    let l = Layout::new(u, n);
    let mut raw: Vec<Vec<i8>> = Vec::new();
    for_each_feasible(u, n, false, &mut |v| {
        raw.push(v.to_vec());
        ControlFlow::Continue(())
    })?;
    raw.sort_unstable();
    raw.dedup();
    Ok(PolytopeSample {
        u,
        n,
        m: l.len(),
        vectors: raw.into_iter().map(|v| IncidenceVector::new(l, v)).collect(),
    })
}

/// `C(u,2) + u² + 2u(n−1)`.
pub fn dim_formula(u: usize, n: usize) -> usize {
    u * u.saturating_sub(1) / 2 + u * u + 2 * u * (n - 1)
}

// ---------------------------------------------------------------------------
// exact rank

trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// `a·b − c·d`, `None` on overflow.
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self>;
    fn gcd_with(&self, o: &Self) -> Self;
    fn div_exact(&self, g: &Self) -> Self;
    fn negative(&self) -> bool;
    fn neg(&self) -> Self;
    fn is_one(&self) -> bool;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)
    }
    fn gcd_with(&self, o: &Self) -> Self {
        self.gcd(o)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        Some(a * b - c * d)
    }
    fn gcd_with(&self, o: &Self) -> Self {
        self.gcd(o)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_one(&self) -> bool {
        *self == BigInt::from(1)
    }
}

/// Row echelon form kept sorted by pivot column.
#[derive(Debug, Clone, Default)]
struct Echelon<T> {
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> Echelon<T> {
    /// Adds `v` if independent. `None` signals overflow (state unchanged).
    fn insert(&mut self, mut v: Vec<T>) -> Option<bool> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let (a, b) = (row[*p].clone(), v[*p].clone());
            for j in *p..v.len() {
                if row[j].is_zero() && v[j].is_zero() {
                    continue;
                }
                v[j] = T::cross(&v[j], &a, &row[j], &b)?;
            }
            normalize(&mut v);
        }
        let Some(p) = v.iter().position(|e| !e.is_zero()) else {
            return Some(false);
        };
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        Some(true)
    }
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let mut g = T::zero();
    for e in v.iter() {
        if !e.is_zero() {
            g = g.gcd_with(e);
            if g.is_one() {
                break;
            }
        }
    }
    if !g.is_zero() && !g.is_one() {
        for e in v.iter_mut() {
            if !e.is_zero() {
                *e = e.div_exact(&g);
            }
        }
    }
    if v.iter().find(|e| !e.is_zero()).is_some_and(|e| e.negative()) {
        for e in v.iter_mut() {
            *e = e.neg();
        }
    }
}

/// Incremental exact rank over the rationals: fraction-free elimination in
/// `i128`, switching to big integers on overflow.
#[derive(Debug, Clone, Default)]
pub struct RankAccumulator {
    small: Echelon<i128>,
    big: Option<Echelon<BigInt>>,
}

impl RankAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        match &self.big {
            Some(b) => b.rows.len(),
            None => self.small.rows.len(),
        }
    }

    /// Adds a vector; returns whether the rank grew.
    pub fn push(&mut self, v: &[i64]) -> bool {
        if self.big.is_none() {
            let small: Vec<i128> = v.iter().map(|&e| e as i128).collect();
            match self.small.insert(small) {
                Some(grew) => return grew,
                None => {
                    let rows = self
                        .small
                        .rows
                        .iter()
                        .map(|(p, r)| (*p, r.iter().map(|&e| BigInt::from(e)).collect()))
                        .collect();
                    self.big = Some(Echelon { rows });
                }
            }
        }
        let big: Vec<BigInt> = v.iter().map(|&e| BigInt::from(e)).collect();
        self.big.as_mut().unwrap().insert(big).expect("big integers do not overflow")
    }
}

/// Affine rank: rank of differences to the first point pushed.
#[derive(Debug, Clone, Default)]
pub struct AffineRank {
    base: Option<Vec<i64>>,
    acc: RankAccumulator,
}

impl AffineRank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.acc.rank()
    }

    pub fn push(&mut self, v: &[i64]) -> bool {
        match &self.base {
            None => {
                self.base = Some(v.to_vec());
                false
            }
            Some(b) => {
                let d: Vec<i64> = v.iter().zip(b).map(|(a, b)| a - b).collect();
                self.acc.push(&d)
            }
        }
    }
}

/// Dimension of the affine hull of the points (0 for a single point).
pub fn affine_rank(vectors: &[Vec<i64>]) -> usize {
    let mut a = AffineRank::new();
    for v in vectors {
        a.push(v);
    }
    a.rank()
}

fn widen(v: &[i8]) -> Vec<i64> {
    v.iter().map(|&e| e as i64).collect()
}

/// Rank of the equation system: degree rows, assignment rows and the depot
/// arc fixings.
pub fn equality_rank(u: usize, n: usize) -> usize {
    let l = Layout::new(u, n);
    let mut acc = RankAccumulator::new();
    let unit = |c: usize| {
        let mut v = vec![0i64; l.len()];
        v[c] = 1;
        v
    };
    for t in l.customers() {
        let mut v = vec![0i64; l.len()];
        for (_, c) in l.incident_edges(t) {
            v[c] = 1;
        }
        v[l.arc(t, t).unwrap()] = -2;
        acc.push(&v);
        let mut w = vec![0i64; l.len()];
        for j in 0..l.n_vertices() {
            w[l.arc(t, j).unwrap()] = 1;
        }
        acc.push(&w);
    }
    for d in l.depots() {
        acc.push(&unit(l.arc(d, d).unwrap()));
        for t in l.customers() {
            acc.push(&unit(l.arc(d, t).unwrap()));
        }
    }
    acc.rank()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub u: usize,
    pub n: usize,
    pub m: usize,
    pub dim_formula: usize,
    pub dim_measured: usize,
    /// `m` minus the rank of the equation system.
    pub dim_upper_bound: usize,
    pub vectors_seen: usize,
    pub pass: bool,
    pub note: Option<String>,
}

/// Measures the dimension of the convex hull of all feasible vectors.
/// Enumeration stops once the rank reaches the bound implied by the
/// equation system.
pub fn verify_dimension(u: usize, n: usize) -> Result<DimensionReport, PolylabError> {
    check_size(u, n, MAX_CUSTOMERS)?;
    let m = Layout::new(u, n).len();
    let upper = m - equality_rank(u, n);
    let mut aff = AffineRank::new();
    let mut seen = 0usize;
    for_each_feasible(u, n, false, &mut |v| {
        seen += 1;
        aff.push(&widen(v));
        if aff.rank() >= upper {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let formula = dim_formula(u, n);
    let measured = aff.rank();
    let pass = measured == formula;
    let note = (!pass).then(|| {
        format!("measured dimension {measured} differs from the formula value {formula} at u={u}, n={n}")
    });
    Ok(DimensionReport {
        u,
        n,
        m,
        dim_formula: formula,
        dim_measured: measured,
        dim_upper_bound: upper,
        vectors_seen: seen,
        pass,
        note,
    })
}

// ---------------------------------------------------------------------------
// inequalities

/// An inequality to test on enumerated vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum InequalitySpec {
    /// A cut family member, in the row form the separators emit.
    Witness(Witness),
    /// Subtour elimination in cut form `x(δ(S)) ≥ 2Σ_{j∈S} y_ij`.
    SecDelta { set: Vec<usize>, i: usize },
    /// Subtour elimination in inner form
    /// `x(γ(S)) ≤ Σ_{v∈S} y_vv − Σ_{j∈S} y_ij`.
    SecInner { set: Vec<usize>, i: usize },
    /// `x_dj ≤ 2 y_jj` for a depot `d` and customer `j`.
    DepotEdge { d: usize, j: usize },
    Raw { name: String, row: Row },
}

impl InequalitySpec {
    pub fn row(&self, l: &Layout) -> Row {
        match self {
            InequalitySpec::Witness(w) => w.row(l),
            InequalitySpec::SecDelta { set, i } => sec_delta_row(l, set, *i),
            InequalitySpec::SecInner { set, i } => sec_gamma_row(l, set, *i),
            InequalitySpec::DepotEdge { d, j } => Row::new(
                vec![(l.edge(*d, *j).unwrap(), 1.0), (l.arc(*j, *j).unwrap(), -2.0)],
                Sense::Le,
                0.0,
            ),
            InequalitySpec::Raw { row, .. } => row.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            InequalitySpec::Witness(w) => format!("{} {:?}", w.family(), w),
            InequalitySpec::SecDelta { set, i } => format!("SEC-delta S={set:?} i={i}"),
            InequalitySpec::SecInner { set, i } => format!("SEC-inner S={set:?} i={i}"),
            InequalitySpec::DepotEdge { d, j } => format!("DEPOT-EDGE d={d} j={j}"),
            InequalitySpec::Raw { name, .. } => name.clone(),
        }
    }
}

fn satisfied(row: &Row, v: &[i8]) -> bool {
    let a: f64 = row.coefs.iter().map(|&(c, w)| w * v[c] as f64).sum();
    match row.sense {
        Sense::Le => a <= row.rhs + 1e-9,
        Sense::Ge => a >= row.rhs - 1e-9,
        Sense::Eq => (a - row.rhs).abs() <= 1e-9,
    }
}

fn tight(row: &Row, v: &[i8]) -> bool {
    let a: f64 = row.coefs.iter().map(|&(c, w)| w * v[c] as f64).sum();
    (a - row.rhs).abs() <= 1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub label: String,
    pub pass: bool,
    pub checked: usize,
    pub counterexample: Option<String>,
}

pub fn verify_valid(spec: &InequalitySpec, sample: &PolytopeSample) -> ValidityReport {
    let l = Layout::new(sample.u, sample.n);
    let row = spec.row(&l);
    let bad = sample.vectors.iter().find(|v| !satisfied(&row, v.values()));
    ValidityReport {
        label: spec.label(),
        pass: bad.is_none(),
        checked: sample.vectors.len(),
        counterexample: bad.map(|v| v.describe()),
    }
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(b, _)| m >> b & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Every instantiation of the subtour (both forms), path elimination, pair,
/// depot-edge, 2-matching, odd-hole and SSP subtour families on `(u, n)`.
pub fn all_instantiations(u: usize, n: usize) -> Vec<InequalitySpec> {
    let l = Layout::new(u, n);
    let cust: Vec<usize> = l.customers().collect();
    let depots: Vec<usize> = l.depots().collect();
    let proper_depots: Vec<Vec<usize>> = subsets(&depots)
        .into_iter()
        .filter(|s| !s.is_empty() && s.len() < depots.len())
        .collect();
    let mut out = Vec::new();
    for set in subsets(&cust).into_iter().filter(|s| !s.is_empty()) {
        for &i in &set {
            out.push(InequalitySpec::SecDelta { set: set.clone(), i });
            out.push(InequalitySpec::SecInner { set: set.clone(), i });
            out.push(InequalitySpec::Witness(Witness::Sec { set: set.clone(), i }));
        }
    }
    for &i in &cust {
        for &j in &cust {
            if i == j {
                continue;
            }
            out.push(InequalitySpec::Witness(Witness::Pair { i, j }));
            for dp in &proper_depots {
                out.push(InequalitySpec::Witness(Witness::Pec2 { j: i, k: j, depots: dp.clone() }));
            }
        }
    }
    for &d in &depots {
        for &j in &cust {
            out.push(InequalitySpec::DepotEdge { d, j });
        }
    }
    for &j in &cust {
        for &k in &cust {
            if j == k {
                continue;
            }
            let rest: Vec<usize> = cust.iter().copied().filter(|&v| v != j && v != k).collect();
            for set in subsets(&rest).into_iter().filter(|s| !s.is_empty()) {
                for &a in &set {
                    for dp in &proper_depots {
                        out.push(InequalitySpec::Witness(Witness::Pec {
                            set: set.clone(),
                            a,
                            j,
                            k,
                            depots: dp.clone(),
                        }));
                    }
                }
            }
        }
    }
    for i in 0..u {
        for j in 0..u {
            for k in 0..u {
                if i < j && i < k && j != k {
                    out.push(InequalitySpec::Witness(Witness::OddHole { i, j, k }));
                    for set in subsets(&cust) {
                        if set.contains(&i) && set.contains(&j) && set.contains(&k) {
                            out.push(InequalitySpec::Witness(Witness::SspSec { set, i, j, k }));
                        }
                    }
                }
            }
        }
    }
    for handle in subsets(&cust).into_iter().filter(|h| h.len() >= 3) {
        let outside: Vec<usize> = cust.iter().copied().filter(|v| !handle.contains(v)).collect();
        let mut teeth_sets = Vec::new();
        odd_teeth(&handle, &outside, 0, &mut Vec::new(), &mut teeth_sets);
        for teeth in teeth_sets {
            out.push(InequalitySpec::Witness(Witness::TwoMatch {
                handle: handle.clone(),
                teeth,
            }));
        }
    }
    out
}

/// Sets of ≥ 3 (odd) disjoint handle–outside edges, handle ends taken in
/// increasing order.
fn odd_teeth(
    handle: &[usize],
    outside: &[usize],
    from: usize,
    cur: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if cur.len() >= 3 && cur.len() % 2 == 1 {
        let mut t = cur.clone();
        t.sort_unstable();
        out.push(t);
    }
    for hi in from..handle.len() {
        let h = handle[hi];
        for &w in outside {
            if cur.iter().any(|&(a, b)| a == w || b == w) {
                continue;
            }
            cur.push((h.min(w), h.max(w)));
            odd_teeth(handle, outside, hi + 1, cur, out);
            cur.pop();
        }
    }
}

pub fn validity_suite(sample: &PolytopeSample) -> Vec<ValidityReport> {
    all_instantiations(sample.u, sample.n)
        .iter()
        .map(|s| verify_valid(s, sample))
        .collect()
}

/// Whether the cut and inner subtour forms agree on every vector for every
/// `(S, i)`.
pub fn sec_forms_agree(sample: &PolytopeSample) -> bool {
    let l = Layout::new(sample.u, sample.n);
    let cust: Vec<usize> = l.customers().collect();
    for set in subsets(&cust).into_iter().filter(|s| !s.is_empty()) {
        for &i in &set {
            let a = sec_delta_row(&l, &set, i);
            let b = sec_gamma_row(&l, &set, i);
            if sample
                .vectors
                .iter()
                .any(|v| satisfied(&a, v.values()) != satisfied(&b, v.values()))
            {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetReport {
    pub label: String,
    pub u: usize,
    pub n: usize,
    pub valid: bool,
    pub tight_vectors: usize,
    pub slack_vectors: usize,
    pub face_rank: usize,
    pub target: usize,
    pub pass: bool,
    pub note: Option<String>,
}

/// Checks validity on every feasible vector and whether the tight vectors
/// span a face of dimension `dim − 1` (formula dimension).
pub fn verify_facet(spec: &InequalitySpec, u: usize, n: usize) -> Result<FacetReport, PolylabError> {
    check_size(u, n, MAX_CUSTOMERS)?;
    let l = Layout::new(u, n);
    let row = spec.row(&l);
    let target = dim_formula(u, n) - 1;
    let mut aff = AffineRank::new();
    let mut valid = true;
    let mut tight_count = 0usize;
    let mut slack = 0usize;
    for_each_feasible(u, n, false, &mut |v| {
        if !satisfied(&row, v) {
            valid = false;
        } else if tight(&row, v) {
            tight_count += 1;
            if aff.rank() < target {
                aff.push(&widen(v));
            }
        } else {
            slack += 1;
        }
        ControlFlow::Continue(())
    })?;
    let face_rank = if tight_count == 0 { 0 } else { aff.rank() };
    let pass = valid && tight_count > 0 && slack > 0 && face_rank == target;
    let note = if !valid {
        Some("inequality is violated by a feasible vector".into())
    } else if tight_count == 0 {
        Some("inequality is tight at no feasible vector".into())
    } else if slack == 0 {
        Some("inequality is tight at every feasible vector (implied equation)".into())
    } else {
        None
    };
    Ok(FacetReport {
        label: spec.label(),
        u,
        n,
        valid,
        tight_vectors: tight_count,
        slack_vectors: slack,
        face_rank,
        target,
        pass,
        note,
    })
}

/// Named facet checks and the smallest customer count each claim needs.
pub fn facet_spec(prop: &str, u: usize, n: usize) -> Result<(InequalitySpec, usize), PolylabError> {
    let l = Layout::new(u, n);
    let need = |k: usize| {
        if u < k.min(2) {
            Err(PolylabError::Invalid(format!("{prop} needs at least {} customers", k.min(2))))
        } else {
            Ok(())
        }
    };
    match prop {
        "prop2" => {
            need(2)?;
            let c = l.edge(0, 1).unwrap();
            let row = Row::new(vec![(c, 1.0)], Sense::Ge, 0.0);
            Ok((
                InequalitySpec::Raw {
                    name: "x[0,1] >= 0".into(),
                    row,
                },
                4,
            ))
        }
        "prop3" => {
            need(2)?;
            Ok((InequalitySpec::SecDelta { set: vec![0, 1], i: 0 }, 2))
        }
        "prop4" => {
            need(2)?;
            if n < 2 {
                return Err(PolylabError::Invalid("prop4 needs at least two depots".into()));
            }
            Ok((
                InequalitySpec::Witness(Witness::Pec2 {
                    j: 0,
                    k: 1,
                    depots: vec![u],
                }),
                2,
            ))
        }
        "prop5" => {
            if u < 6 {
                return Err(PolylabError::Invalid("prop5 needs at least 6 customers".into()));
            }
            Ok((
                InequalitySpec::Witness(Witness::TwoMatch {
                    handle: vec![0, 1, 2],
                    teeth: vec![(0, 3), (1, 4), (2, 5)],
                }),
                6,
            ))
        }
        "sec1" => {
            need(1)?;
            Ok((InequalitySpec::SecDelta { set: vec![0], i: 0 }, 1))
        }
        other => Err(PolylabError::Invalid(format!("unknown facet check {other:?}"))),
    }
}

/// Runs a named facet check. Below the size a claim is stated for, the
/// check cannot confirm the claim and reports failure; the measured face
/// dimension is kept in the report.
pub fn run_facet(prop: &str, u: usize, n: usize) -> Result<FacetReport, PolylabError> {
    let (spec, min_u) = facet_spec(prop, u, n)?;
    let mut r = verify_facet(&spec, u, n)?;
    if u < min_u {
        let req = format!(
            "requires |T| ≥ {min_u} (measured face dimension {} of {})",
            r.face_rank, r.target
        );
        r.note = Some(match r.note {
            Some(n) => format!("{req}; {n}"),
            None => req,
        });
        r.pass = false;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub u: usize,
    pub n: usize,
    pub m: usize,
    pub dim_formula: usize,
    pub dim_measured: Option<usize>,
    pub checks: Vec<serde_json::Value>,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// brute-force optimum

struct Oracle<'a> {
    inst: &'a Instance,
    u: usize,
    depots: Vec<usize>,
    /// `path[d][mask][last]`: cheapest path from depot `d` through `mask`
    /// ending at `last`.
    path: Vec<Vec<Vec<f64>>>,
    cycle: Vec<Vec<f64>>,
    block: Vec<f64>,
    cover: Vec<f64>,
    tol: f64,
}

impl<'a> Oracle<'a> {
    fn new(inst: &'a Instance) -> Self {
        let u = inst.n_customers();
        let full = 1usize << u;
        let depots: Vec<usize> = inst.depots().collect();
        let c = |a: usize, b: usize| inst.routing_cost(a, b);
        let mut path = Vec::new();
        let mut cycle = Vec::new();
        for &d in &depots {
            let mut dp = vec![vec![f64::INFINITY; u]; full];
            for t in 0..u {
                dp[1 << t][t] = c(d, t);
            }
            for mask in 1..full {
                for last in 0..u {
                    let cur = dp[mask][last];
                    if !cur.is_finite() {
                        continue;
                    }
                    for next in 0..u {
                        if mask >> next & 1 == 0 {
                            let v = cur + c(last, next);
                            let slot = &mut dp[mask | 1 << next][next];
                            if v < *slot {
                                *slot = v;
                            }
                        }
                    }
                }
            }
            let mut cyc = vec![f64::INFINITY; full];
            for (mask, slot) in cyc.iter_mut().enumerate().skip(1) {
                if mask.count_ones() == 1 {
                    let t = mask.trailing_zeros() as usize;
                    *slot = 2.0 * c(d, t);
                } else {
                    *slot = (0..u)
                        .filter(|&l| mask >> l & 1 == 1)
                        .map(|l| dp[mask][l] + c(l, d))
                        .fold(f64::INFINITY, f64::min);
                }
            }
            path.push(dp);
            cycle.push(cyc);
        }
        let block: Vec<f64> = (0..full)
            .map(|m| if m == 0 { 0.0 } else { cycle.iter().map(|c| c[m]).fold(f64::INFINITY, f64::min) })
            .collect();
        let mut cover = vec![f64::INFINITY; full];
        cover[0] = 0.0;
        for mask in 1..full {
            let first = mask & mask.wrapping_neg();
            let rest = mask & !first;
            let mut sub = rest;
            let mut best = f64::INFINITY;
            loop {
                let b = sub | first;
                best = best.min(block[b] + cover[mask & !b]);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            cover[mask] = best;
        }
        Oracle {
            inst,
            u,
            depots,
            path,
            cycle,
            block,
            cover,
            tol: 0.0,
        }
    }

    fn star_cost(&self, t: usize, ring: usize) -> f64 {
        self.targets(ring)
            .map(|k| self.inst.assignment_cost(t, k))
            .fold(f64::INFINITY, f64::min)
    }

    fn targets(&self, ring: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.u)
            .filter(move |&k| ring >> k & 1 == 1)
            .chain(self.depots.iter().copied())
    }

    fn total(&self, ring: usize) -> f64 {
        let mut c = self.cover[ring];
        for t in 0..self.u {
            c += if ring >> t & 1 == 1 {
                self.inst.assignment_cost(t, t)
            } else {
                self.star_cost(t, ring)
            };
        }
        c
    }

    /// Optimal customer orders of the cycle through depot index `di` and
    /// `mask`, both directions.
    fn tours(&self, di: usize, mask: usize) -> Vec<Vec<usize>> {
        let d = self.depots[di];
        let c = |a: usize, b: usize| self.inst.routing_cost(a, b);
        if mask.count_ones() == 1 {
            return vec![vec![mask.trailing_zeros() as usize]];
        }
        let dp = &self.path[di];
        let goal = self.cycle[di][mask];
        let mut out = Vec::new();
        for last in 0..self.u {
            if mask >> last & 1 == 1 && dp[mask][last] + c(last, d) <= goal + self.tol {
                self.back(di, mask, last, &mut vec![last], &mut out);
            }
        }
        out
    }

    fn back(&self, di: usize, mask: usize, last: usize, rev: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if out.len() >= TIE_CAP {
            return;
        }
        let dp = &self.path[di];
        let prev_mask = mask & !(1 << last);
        if prev_mask == 0 {
            let mut t = rev.clone();
            t.reverse();
            out.push(t);
            return;
        }
        for p in 0..self.u {
            if prev_mask >> p & 1 == 1
                && dp[prev_mask][p] + self.inst.routing_cost(p, last) <= dp[mask][last] + self.tol
            {
                rev.push(p);
                self.back(di, prev_mask, p, rev, out);
                rev.pop();
            }
        }
    }

    /// Optimal ring structures covering `mask`: lists of (depot, order).
    fn structures(&self, mask: usize, cur: &mut Vec<(usize, Vec<usize>)>, out: &mut Vec<Vec<(usize, Vec<usize>)>>) {
        if out.len() >= TIE_CAP {
            return;
        }
        if mask == 0 {
            out.push(cur.clone());
            return;
        }
        let first = mask & mask.wrapping_neg();
        let rest = mask & !first;
        let mut sub = rest;
        loop {
            let b = sub | first;
            if self.block[b] + self.cover[mask & !b] <= self.cover[mask] + self.tol {
                for di in 0..self.depots.len() {
                    if self.cycle[di][b] <= self.block[b] + self.tol {
                        for tour in self.tours(di, b) {
                            cur.push((self.depots[di], tour));
                            self.structures(mask & !b, cur, out);
                            cur.pop();
                        }
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
}

/// Exact optimum by enumeration of ring sets, Held–Karp ring costs and
/// cheapest star targets. Among optimal solutions the one with the
/// lexicographically smallest incidence vector is returned (comparison
/// capped at a fixed number of tied candidates).
pub fn brute_force_opt(inst: &Instance) -> Result<Solution, PolylabError> {
    let u = inst.n_customers();
    check_size(u, inst.n_depots(), ORACLE_MAX_CUSTOMERS)?;
    let mut o = Oracle::new(inst);
    let totals: Vec<f64> = (0..1usize << u).map(|r| o.total(r)).collect();
    let opt = totals.iter().copied().fold(f64::INFINITY, f64::min);
    o.tol = 1e-9 * opt.abs().max(1.0);
    let mut best: Option<(Vec<i8>, Solution)> = None;
    let mut examined = 0usize;
    for (ring, &tot) in totals.iter().enumerate() {
        if tot > opt + o.tol || examined >= TIE_CAP {
            continue;
        }
        let mut structs = Vec::new();
        o.structures(ring, &mut Vec::new(), &mut structs);
        let star_choices: Vec<(usize, Vec<usize>)> = (0..u)
            .filter(|&t| ring >> t & 1 == 0)
            .map(|t| {
                let m = o.star_cost(t, ring);
                let ks = o
                    .targets(ring)
                    .filter(|&k| inst.assignment_cost(t, k) <= m + o.tol)
                    .collect();
                (t, ks)
            })
            .collect();
        for s in structs {
            let rings: Vec<Ring> = s.into_iter().map(|(d, c)| Ring::new(d, c)).collect();
            let mut idx = vec![0usize; star_choices.len()];
            loop {
                examined += 1;
                let sol = Solution {
                    rings: rings.clone(),
                    assignments: star_choices
                        .iter()
                        .zip(&idx)
                        .map(|((t, ks), &i)| (*t, ks[i]))
                        .collect(),
                };
                let vec = sol
                    .to_incidence(inst)
                    .map_err(|e| PolylabError::Invalid(e.to_string()))?
                    .into_values();
                let better = match &best {
                    None => true,
                    Some((b, _)) => vec.cmp(b) == Ordering::Less,
                };
                if better {
                    best = Some((vec, sol));
                }
                // odometer over star targets
                let mut p = 0;
                while p < idx.len() {
                    idx[p] += 1;
                    if idx[p] < star_choices[p].1.len() {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == idx.len() || examined >= TIE_CAP {
                    break;
                }
            }
        }
    }
    let (_, mut sol) = best.ok_or_else(|| PolylabError::Invalid("no feasible solution found".into()))?;
    sol.normalize();
    Ok(sol)
}

// ---------------------------------------------------------------------------
// oracle suite

/// Instance `index` of the oracle suite: `u = 4 + index mod 5` customers,
/// `n = 2 + (index / 5) mod 2` depots, Class I for even indices and Class II
/// (α cycling through 3, 5, 7, 9) for odd ones.
pub fn oracle_instance(index: usize) -> Instance {
    let u = 4 + index % 5;
    let n = 2 + (index / 5) % 2;
    let (class, alpha) = if index.is_multiple_of(2) {
        (ClassTag::I, None)
    } else {
        (ClassTag::II, Some([3, 5, 7, 9][(index / 2) % 4]))
    };
    let base = CostModel::random_points(u, 100.0, 1000 + index as u64);
    let mut inst =
        generate_instance(&base, n, class, alpha, index as u64).expect("suite parameters are valid");
    inst.set_name(format!("oracle-{index}"));
    inst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub index: usize,
    pub u: usize,
    pub n: usize,
    pub class: ClassTag,
    pub alpha: Option<u32>,
    pub oracle: f64,
    pub solver: f64,
    pub termination: Termination,
    pub pass: bool,
}

/// Solves oracle instance `index` both ways and compares objectives within
/// `1e-6 · max(1, |opt|)`.
pub fn oracle_case(index: usize, params: &Params) -> Result<OracleCase, PolylabError> {
    let inst = oracle_instance(index);
    let oracle = brute_force_opt(&inst)?.cost(&inst);
    let rep = branch_and_cut(&inst, params).map_err(|e| PolylabError::Invalid(e.to_string()))?;
    let feasible = rep.incumbent.as_ref().is_some_and(|s| s.is_feasible(&inst));
    let pass = feasible
        && rep.termination == Termination::Optimal
        && (rep.ub - oracle).abs() <= 1e-6 * oracle.abs().max(1.0);
    Ok(OracleCase {
        index,
        u: inst.n_customers(),
        n: inst.n_depots(),
        class: inst.class(),
        alpha: inst.alpha(),
        oracle,
        solver: rep.ub,
        termination: rep.termination,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPathReport {
    /// Feasible vectors containing at least one depot–customer–depot path.
    pub checked: usize,
    /// Of those, how many got more expensive after the replacement.
    pub worse: usize,
}

/// Enumerates every feasible vector of `inst` including 2-paths, replaces
/// each 2-path by the degenerate ring on its cheaper depot and counts cost
/// increases.
pub fn two_path_check(inst: &Instance) -> Result<TwoPathReport, PolylabError> {
    let l = inst.layout();
    let obj = inst.objective();
    let cost = |v: &[i8]| -> f64 { v.iter().zip(&obj).map(|(&a, c)| a as f64 * c).sum() };
    let mut rep = TwoPathReport { checked: 0, worse: 0 };
    for_each_feasible(l.n_customers(), l.n_depots(), true, &mut |v| {
        let mut w = v.to_vec();
        let mut any = false;
        for t in l.customers() {
            let ends: Vec<usize> = l.depots().filter(|&d| v[l.edge(d, t).unwrap()] == 1).collect();
            if ends.len() == 2 {
                any = true;
                let keep = if inst.routing_cost(ends[0], t) <= inst.routing_cost(ends[1], t) {
                    ends[0]
                } else {
                    ends[1]
                };
                for d in ends {
                    w[l.edge(d, t).unwrap()] = if d == keep { 2 } else { 0 };
                }
            }
        }
        if any {
            rep.checked += 1;
            if cost(&w) > cost(v) + 1e-9 * cost(v).abs().max(1.0) {
                rep.worse += 1;
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(rep)
}
