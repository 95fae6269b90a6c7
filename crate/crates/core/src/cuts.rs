//! Fractional points, inequality witnesses, and the separation routines.
//!
//! Every [`Cut`] carries the [`Witness`] that generated it; the witness alone
//! rebuilds the row, so cuts can be audited against enumerated solutions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::CapGraph;
use crate::instance::{IncidenceVector, Layout};
use crate::lp::{Row, Sense};

/// Support threshold: entries at or below this are treated as zero.
pub const EPS_SUPP: f64 = 1e-6;
/// Minimum violation for a cut to be reported.
pub const EPS_CUT: f64 = 1e-4;
/// Tolerance for recognizing `x_e = 1` teeth.
pub const TOOTH_TOL: f64 = 1e-6;

/// Per-round limits on the number of cuts added.
pub const SEC_CAP: usize = 50;
pub const PEC_CAP: usize = 50;
pub const TWO_MATCH_CAP: usize = 30;

/// An LP point `(x*, y*)` in the canonical column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint {
    layout: Layout,
    values: Vec<f64>,
}

/// The support graph `G*` together with its vertex set `V*`.
#[derive(Debug, Clone)]
pub struct Support {
    pub graph: CapGraph,
    pub vertices: Vec<bool>,
}

impl Support {
    /// Components of `G*` restricted to `V*`, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.graph
            .connected_components()
            .into_iter()
            .filter(|c| c.iter().all(|&v| self.vertices[v]))
            .collect()
    }
}

impl FractionalPoint {
    /// Every column is nonnegative in the model, so rounding noise below zero
    /// is clamped away.
    pub fn new(layout: Layout, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), layout.len(), "point length must match layout");
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        FractionalPoint { layout, values }
    }

    pub fn from_incidence(v: &IncidenceVector) -> Self {
        FractionalPoint {
            layout: v.layout(),
            values: v.values().iter().map(|&e| e as f64).collect(),
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x(&self, a: usize, b: usize) -> f64 {
        self.layout.edge(a, b).map_or(0.0, |c| self.values[c])
    }

    pub fn y(&self, i: usize, j: usize) -> f64 {
        self.layout.arc(i, j).map_or(0.0, |c| self.values[c])
    }

    /// `Σ_{d∈D} x_dv`.
    fn x_depots(&self, v: usize) -> f64 {
        self.layout.depots().map(|d| self.x(d, v)).sum()
    }

    pub fn is_integral(&self, tol: f64) -> bool {
        self.values.iter().all(|v| (v - v.round()).abs() <= tol)
    }

    /// `G*`: vertices with `y_ii > ε_supp` (depots always), edges with
    /// `x_e > ε_supp`.
    pub fn support_graph(&self) -> Support {
        let l = self.layout;
        let vertices: Vec<bool> = (0..l.n_vertices())
            .map(|v| l.is_depot(v) || self.y(v, v) > EPS_SUPP)
            .collect();
        let mut graph = CapGraph::new(l.n_vertices());
        for c in 0..l.n_edges() {
            if let crate::instance::Column::Edge(a, b) = l.column(c) {
                if self.values[c] > EPS_SUPP && vertices[a] && vertices[b] {
                    graph.add_edge(a, b, self.values[c]);
                }
            }
        }
        Support { graph, vertices }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Pair,
    Sec,
    Pec2,
    Pec,
    TwoMatch,
    OddHole,
    SspSec,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Pair,
        Family::Sec,
        Family::Pec2,
        Family::Pec,
        Family::TwoMatch,
        Family::OddHole,
        Family::SspSec,
    ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Pair => "PAIR",
            Family::Sec => "SEC",
            Family::Pec2 => "PEC2",
            Family::Pec => "PEC",
            Family::TwoMatch => "TWO_MATCH",
            Family::OddHole => "ODD_HOLE",
            Family::SspSec => "SSP_SEC",
        })
    }
}

/// Parameters identifying one inequality. Vertex sets are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Witness {
    /// `x_ij ≤ y_jj − y_ij`.
    Pair { i: usize, j: usize },
    /// `x(δ(S)) ≥ 2 Σ_{j∈S} y_ij`.
    Sec { set: Vec<usize>, i: usize },
    /// `x(D':{j}) + 3x_jk + x({k}:D∖D') ≤ 2(y_jj + y_kk)`.
    Pec2 { j: usize, k: usize, depots: Vec<usize> },
    /// Path elimination through `S ∪ {j, k}` with hub `a ∈ S`.
    Pec {
        set: Vec<usize>,
        a: usize,
        j: usize,
        k: usize,
        depots: Vec<usize>,
    },
    /// `x(γ(H)) + x(teeth) ≤ Σ_{i∈H} y_ii + (|teeth| − 1)/2`.
    TwoMatch {
        handle: Vec<usize>,
        teeth: Vec<(usize, usize)>,
    },
    /// `y_ij + y_jk + y_ki ≤ 1`.
    OddHole { i: usize, j: usize, k: usize },
    /// `x(δ(S)) ≥ 2(y_ij + y_jk + y_ki)` with `i, j, k ∈ S`.
    SspSec {
        set: Vec<usize>,
        i: usize,
        j: usize,
        k: usize,
    },
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn edge_coef(l: &Layout, a: usize, b: usize) -> usize {
    l.edge(a, b).expect("edge between distinct non-depot-pair vertices")
}

fn arc_coef(l: &Layout, i: usize, j: usize) -> usize {
    l.arc(i, j).expect("arc with customer tail")
}

/// `x(δ(S))` coefficients with the given weight.
fn delta_terms(l: &Layout, set: &[usize], w: f64, out: &mut Vec<(usize, f64)>) {
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    for &v in set {
        for (other, c) in l.incident_edges(v) {
            if !inside.contains(&other) {
                out.push((c, w));
            }
        }
    }
}

/// `x(γ(S))` coefficients with the given weight.
fn gamma_terms(l: &Layout, set: &[usize], w: f64, out: &mut Vec<(usize, f64)>) {
    for (p, &a) in set.iter().enumerate() {
        for &b in &set[p + 1..] {
            out.push((edge_coef(l, a, b), w));
        }
    }
}

/// Subtour elimination row in cut form `x(δ(S)) − 2Σ_{j∈S} y_ij ≥ 0`.
pub fn sec_delta_row(l: &Layout, set: &[usize], i: usize) -> Row {
    let mut c = Vec::new();
    delta_terms(l, set, 1.0, &mut c);
    for &j in set {
        c.push((arc_coef(l, i, j), -2.0));
    }
    Row::new(c, Sense::Ge, 0.0)
}

/// Subtour elimination row in inner form
/// `x(γ(S)) − Σ_{v∈S} y_vv + Σ_{j∈S} y_ij ≤ 0`; equal to the cut form on
/// points satisfying the degree equations.
pub fn sec_gamma_row(l: &Layout, set: &[usize], i: usize) -> Row {
    let mut c = Vec::new();
    gamma_terms(l, set, 1.0, &mut c);
    for &v in set {
        c.push((arc_coef(l, v, v), -1.0));
        c.push((arc_coef(l, i, v), 1.0));
    }
    Row::new(c, Sense::Le, 0.0)
}

fn sparser(a: Row, b: Row) -> Row {
    if b.coefs.len() < a.coefs.len() {
        b
    } else {
        a
    }
}

impl Witness {
    pub fn family(&self) -> Family {
        match self {
            Witness::Pair { .. } => Family::Pair,
            Witness::Sec { .. } => Family::Sec,
            Witness::Pec2 { .. } => Family::Pec2,
            Witness::Pec { .. } => Family::Pec,
            Witness::TwoMatch { .. } => Family::TwoMatch,
            Witness::OddHole { .. } => Family::OddHole,
            Witness::SspSec { .. } => Family::SspSec,
        }
    }

    /// Instantiates the inequality. Where two forms are equivalent under the
    /// degree equations, the one with fewer nonzeros is used.
    pub fn row(&self, l: &Layout) -> Row {
        match self {
            Witness::Pair { i, j } => Row::new(
                vec![
                    (edge_coef(l, *i, *j), 1.0),
                    (arc_coef(l, *j, *j), -1.0),
                    (arc_coef(l, *i, *j), 1.0),
                ],
                Sense::Le,
                0.0,
            ),
            Witness::Sec { set, i } => sparser(sec_gamma_row(l, set, *i), sec_delta_row(l, set, *i)),
            Witness::Pec2 { j, k, depots } => {
                let mut c = vec![
                    (edge_coef(l, *j, *k), 3.0),
                    (arc_coef(l, *j, *j), -2.0),
                    (arc_coef(l, *k, *k), -2.0),
                ];
                for d in l.depots() {
                    if depots.contains(&d) {
                        c.push((edge_coef(l, d, *j), 1.0));
                    } else {
                        c.push((edge_coef(l, d, *k), 1.0));
                    }
                }
                Row::new(c, Sense::Le, 0.0)
            }
            Witness::Pec {
                set,
                a,
                j,
                k,
                depots,
            } => {
                let bar = sorted(set.iter().copied().chain([*j, *k]).collect());
                let mut ends = Vec::new();
                for d in l.depots() {
                    if depots.contains(&d) {
                        ends.push((edge_coef(l, d, *j), 1.0));
                    } else {
                        ends.push((edge_coef(l, d, *k), 1.0));
                    }
                }
                let stars: Vec<(usize, f64)> = set.iter().map(|&b| (arc_coef(l, *a, b), 1.0)).collect();
                let mut inner = ends.clone();
                gamma_terms(l, &bar, 2.0, &mut inner);
                for &v in &bar {
                    inner.push((arc_coef(l, v, v), -2.0));
                }
                inner.extend(stars.iter().copied());
                let mut cut = ends;
                delta_terms(l, &bar, -1.0, &mut cut);
                cut.extend(stars);
                sparser(Row::new(inner, Sense::Le, 0.0), Row::new(cut, Sense::Le, 0.0))
            }
            Witness::TwoMatch { handle, teeth } => {
                let mut c = Vec::new();
                gamma_terms(l, handle, 1.0, &mut c);
                for &(a, b) in teeth {
                    c.push((edge_coef(l, a, b), 1.0));
                }
                for &v in handle {
                    c.push((arc_coef(l, v, v), -1.0));
                }
                Row::new(c, Sense::Le, (teeth.len() as f64 - 1.0) / 2.0)
            }
            Witness::OddHole { i, j, k } => Row::new(
                vec![
                    (arc_coef(l, *i, *j), 1.0),
                    (arc_coef(l, *j, *k), 1.0),
                    (arc_coef(l, *k, *i), 1.0),
                ],
                Sense::Le,
                1.0,
            ),
            Witness::SspSec { set, i, j, k } => {
                let mut c = Vec::new();
                delta_terms(l, set, 1.0, &mut c);
                for (p, q) in [(i, j), (j, k), (k, i)] {
                    c.push((arc_coef(l, *p, *q), -2.0));
                }
                Row::new(c, Sense::Ge, 0.0)
            }
        }
    }
}

/// A violated inequality and the witness that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub witness: Witness,
    pub row: Row,
    /// Violation at the generating point.
    pub violation: f64,
}

impl Cut {
    pub fn at(p: &FractionalPoint, witness: Witness) -> Cut {
        let row = witness.row(&p.layout);
        let violation = row.violation(&p.values);
        Cut {
            witness,
            row,
            violation,
        }
    }

    pub fn family(&self) -> Family {
        self.witness.family()
    }

    /// Human-readable row with its witness.
    pub fn describe(&self, l: &Layout) -> String {
        use crate::instance::Column;
        let mut s = format!("{} {:?} viol={:.6}:", self.family(), self.witness, self.violation);
        for &(c, v) in &self.row.coefs {
            let name = match l.column(c) {
                Column::Edge(a, b) => format!("x[{a},{b}]"),
                Column::Arc(i, j) => format!("y[{i},{j}]"),
            };
            s.push_str(&format!(" {v:+} {name}"));
        }
        let sense = match self.row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        s.push_str(&format!(" {sense} {}", self.row.rhs));
        s
    }
}

fn keep(p: &FractionalPoint, w: Witness, out: &mut Vec<Cut>, seen: &mut BTreeSet<Witness>) {
    if seen.contains(&w) {
        return;
    }
    let cut = Cut::at(p, w.clone());
    if cut.violation > EPS_CUT {
        seen.insert(w);
        out.push(cut);
    }
}

/// Most violated first, then by witness.
pub fn sort_cuts(cuts: &mut [Cut]) {
    cuts.sort_by(|a, b| {
        b.violation
            .total_cmp(&a.violation)
            .then_with(|| a.witness.cmp(&b.witness))
    });
}

fn finish(mut cuts: Vec<Cut>) -> Vec<Cut> {
    sort_cuts(&mut cuts);
    cuts
}

pub fn sep_pairs(p: &FractionalPoint) -> Vec<Cut> {
    let l = p.layout;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for i in l.customers() {
        for j in l.customers() {
            if i != j && p.x(i, j) - p.y(j, j) + p.y(i, j) > EPS_CUT {
                keep(p, Witness::Pair { i, j }, &mut out, &mut seen);
            }
        }
    }
    finish(out)
}

/// Capacitated graph on customers plus a contracted depot vertex `u` whose
/// minimum cut with sink `i` is `min_{S∋i} x(δ(S)) + 2Σ_{j∉S} y_ij`.
fn sec_graph(p: &FractionalPoint, i: usize) -> CapGraph {
    let l = p.layout;
    let u = l.n_customers();
    let s = u;
    let mut g = CapGraph::new(u + 1);
    for a in l.customers() {
        let mut to_depots = p.x_depots(a);
        if a == i {
            to_depots += 2.0 * l.depots().map(|d| p.y(i, d)).sum::<f64>();
        }
        g.add_edge(s, a, to_depots);
        for b in a + 1..u {
            let mut cap = p.x(a, b);
            if a == i {
                cap += 2.0 * p.y(i, b);
            } else if b == i {
                cap += 2.0 * p.y(i, a);
            }
            g.add_edge(a, b, cap);
        }
    }
    g
}

/// For every customer `i`, the exact minimum over `S ∋ i` of
/// `x(δ(S)) + 2Σ_{j∉S} y_ij`, with a minimizing `S`.
pub fn sec_minima(p: &FractionalPoint) -> Vec<(f64, Vec<usize>)> {
    let u = p.layout.n_customers();
    p.layout
        .customers()
        .map(|i| {
            let cut = sec_graph(p, i).min_st_cut(u, i);
            let set = (0..u).filter(|&v| !cut.source_side[v]).collect();
            (cut.value, set)
        })
        .collect()
}

pub fn sep_sec(p: &FractionalPoint) -> Vec<Cut> {
    let l = p.layout;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for comp in p.support_graph().components() {
        if comp.iter().any(|&v| l.is_depot(v)) {
            continue;
        }
        for &i in &comp {
            keep(
                p,
                Witness::Sec {
                    set: comp.clone(),
                    i,
                },
                &mut out,
                &mut seen,
            );
        }
    }
    for (i, (value, set)) in l.customers().zip(sec_minima(p)) {
        if value < 2.0 - EPS_CUT {
            keep(p, Witness::Sec { set, i }, &mut out, &mut seen);
        }
    }
    finish(out)
}

/// `D' = {d : x_jd ≥ x_kd}`, made proper by dropping the depot with the
/// smallest margin when every depot qualifies. `None` with a single depot.
fn best_depot_split(p: &FractionalPoint, j: usize, k: usize) -> Option<Vec<usize>> {
    let l = p.layout;
    if l.n_depots() < 2 {
        return None;
    }
    let mut dp: Vec<usize> = l.depots().filter(|&d| p.x(j, d) >= p.x(k, d)).collect();
    if dp.is_empty() {
        return None;
    }
    if dp.len() == l.n_depots() {
        let weakest = *dp
            .iter()
            .min_by(|&&a, &&b| {
                (p.x(j, a) - p.x(k, a))
                    .total_cmp(&(p.x(j, b) - p.x(k, b)))
                    .then(a.cmp(&b))
            })
            .unwrap();
        dp.retain(|&d| d != weakest);
    }
    Some(dp)
}

fn split_value(p: &FractionalPoint, j: usize, k: usize, dp: &[usize]) -> f64 {
    p.layout
        .depots()
        .map(|d| if dp.contains(&d) { p.x(d, j) } else { p.x(k, d) })
        .sum()
}

pub fn sep_pec_2path(p: &FractionalPoint) -> Vec<Cut> {
    let l = p.layout;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    if l.n_depots() < 2 {
        return out;
    }
    let active: Vec<usize> = l.customers().filter(|&v| p.y(v, v) > EPS_SUPP).collect();
    for &j in &active {
        for &k in &active {
            if j == k {
                continue;
            }
            // the tie rule can yield D' = D for both orientations; the
            // ordered pair visits both splits
            let Some(depots) = best_depot_split(p, j, k) else {
                continue;
            };
            let lhs = split_value(p, j, k, &depots) + 3.0 * p.x(j, k);
            if lhs > 2.0 * (p.y(j, j) + p.y(k, k)) + EPS_CUT {
                keep(p, Witness::Pec2 { j, k, depots }, &mut out, &mut seen);
            }
        }
    }
    finish(out)
}

/// Customers plus source `u` and sink `u + 1` (the contracted depots), with
/// the assignment arcs of `a` folded into its edges.
fn pec_graph(p: &FractionalPoint, a: usize) -> CapGraph {
    let l = p.layout;
    let u = l.n_customers();
    let t = u + 1;
    let mut g = CapGraph::new(u + 2);
    for c in l.customers() {
        let mut cap = p.x_depots(c);
        if c == a {
            cap += l.depots().map(|d| p.y(a, d)).sum::<f64>();
        }
        g.add_edge(c, t, cap);
        for b in c + 1..u {
            let mut cap = p.x(c, b);
            if c == a {
                cap += p.y(a, b);
            } else if b == a {
                cap += p.y(a, c);
            }
            g.add_edge(c, b, cap);
        }
    }
    g
}

pub fn sep_pec_long(p: &FractionalPoint) -> Vec<Cut> {
    let l = p.layout;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    if l.n_depots() < 2 {
        return out;
    }
    let u = l.n_customers();
    let (s, t) = (u, u + 1);
    let base_total: f64 = p.values[..l.n_edges()].iter().sum::<f64>()
        + l.customers().flat_map(|a| (0..l.n_vertices()).map(move |b| (a, b))).map(|(a, b)| p.y(a, b)).sum::<f64>();
    let huge = 1.0 + base_total;
    for comp in p.support_graph().components() {
        let cust: Vec<usize> = comp.iter().copied().filter(|&v| l.is_customer(v)).collect();
        if cust.len() < 3 {
            continue;
        }
        // the flow graph depends only on `a`; `j`, `k`, `a` join the source
        let graphs: BTreeMap<usize, CapGraph> = cust.iter().map(|&a| (a, pec_graph(p, a))).collect();
        for (pj, &j) in cust.iter().enumerate() {
            for &k in &cust[pj + 1..] {
                let Some(depots) = best_depot_split(p, j, k) else {
                    continue;
                };
                let ends = split_value(p, j, k, &depots);
                for &a in &cust {
                    if a == j || a == k {
                        continue;
                    }
                    let big_l = ends + 1.0 - p.y(a, j) - p.y(a, k);
                    if big_l <= EPS_CUT {
                        continue;
                    }
                    let extra = [(s, j, huge), (s, k, huge), (s, a, huge)];
                    let cut = graphs[&a].min_st_cut_with(s, t, &extra);
                    if cut.value < big_l - EPS_CUT {
                        let set: Vec<usize> = (0..u)
                            .filter(|&v| cut.source_side[v] && v != j && v != k)
                            .collect();
                        keep(
                            p,
                            Witness::Pec {
                                set,
                                a,
                                j,
                                k,
                                depots: depots.clone(),
                            },
                            &mut out,
                            &mut seen,
                        );
                    }
                }
            }
        }
    }
    finish(out)
}

pub fn sep_two_matching(p: &FractionalPoint) -> Vec<Cut> {
    let l = p.layout;
    let u = l.n_customers();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let active: Vec<bool> = (0..u).map(|v| p.y(v, v) > EPS_SUPP).collect();
    let mut g = CapGraph::new(u);
    for a in 0..u {
        for b in a + 1..u {
            let x = p.x(a, b);
            if active[a] && active[b] && x > EPS_SUPP && x < 1.0 - TOOTH_TOL {
                g.add_edge(a, b, x);
            }
        }
    }
    for handle in g.connected_components() {
        if handle.len() < 2 || !handle.iter().all(|&v| active[v]) {
            continue;
        }
        let mut used = BTreeSet::new();
        let mut teeth = Vec::new();
        for &h in &handle {
            for w in 0..u {
                if handle.binary_search(&w).is_ok() || (p.x(h, w) - 1.0).abs() > TOOTH_TOL {
                    continue;
                }
                if used.contains(&h) || used.contains(&w) {
                    continue;
                }
                used.insert(h);
                used.insert(w);
                teeth.push((h.min(w), h.max(w)));
            }
        }
        if teeth.len() < 3 || teeth.len() % 2 == 0 {
            continue;
        }
        teeth.sort_unstable();
        keep(p, Witness::TwoMatch { handle, teeth }, &mut out, &mut seen);
    }
    finish(out)
}

pub fn sep_odd_hole(p: &FractionalPoint) -> Vec<Cut> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, j, k) in positive_triples(p) {
        if p.y(i, j) + p.y(j, k) + p.y(k, i) > 1.0 + EPS_CUT {
            keep(p, Witness::OddHole { i, j, k }, &mut out, &mut seen);
        }
    }
    finish(out)
}

/// Cyclic triples `(i, j, k)` with `i` smallest and all three arcs positive.
fn positive_triples(p: &FractionalPoint) -> Vec<(usize, usize, usize)> {
    let u = p.layout.n_customers();
    let mut out = Vec::new();
    for i in 0..u {
        for j in i + 1..u {
            for k in i + 1..u {
                if j != k && p.y(i, j) > EPS_SUPP && p.y(j, k) > EPS_SUPP && p.y(k, i) > EPS_SUPP {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

pub fn sep_ssp_sec(p: &FractionalPoint) -> Vec<Cut> {
    let l = p.layout;
    let u = l.n_customers();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let (s, t) = (u, u + 1);
    let mut base = CapGraph::new(u + 2);
    for a in 0..u {
        base.add_edge(s, a, p.x_depots(a));
        for b in a + 1..u {
            base.add_edge(a, b, p.x(a, b));
        }
    }
    let huge = 1.0 + base.total_capacity();
    for (i, j, k) in positive_triples(p) {
        let rhs = 2.0 * (p.y(i, j) + p.y(j, k) + p.y(k, i));
        let mut g = base.clone();
        for v in [i, j, k] {
            g.add_edge(v, t, huge);
        }
        let cut = g.min_st_cut(s, t);
        if cut.value < rhs - EPS_CUT {
            let set = (0..u).filter(|&v| !cut.source_side[v]).collect();
            keep(p, Witness::SspSec { set, i, j, k }, &mut out, &mut seen);
        }
    }
    finish(out)
}

/// Runs the separator for one family.
pub fn separate(p: &FractionalPoint, family: Family) -> Vec<Cut> {
    match family {
        Family::Pair => sep_pairs(p),
        Family::Sec => sep_sec(p),
        Family::Pec2 => sep_pec_2path(p),
        Family::Pec => sep_pec_long(p),
        Family::TwoMatch => sep_two_matching(p),
        Family::OddHole => sep_odd_hole(p),
        Family::SspSec => sep_ssp_sec(p),
    }
}
