//! Undirected capacitated graphs: connected components and exact s–t
//! minimum cuts.

use std::collections::HashMap;

/// Residual capacities below this are treated as saturated.
const RESIDUAL_EPS: f64 = 1e-12;

/// Undirected graph on vertices `0..n` with nonnegative edge capacities.
/// Parallel edges are merged by adding their capacities; self-loops are
/// dropped.
#[derive(Debug, Clone, Default)]
pub struct CapGraph {
    n: usize,
    index: HashMap<(usize, usize), usize>,
    edges: Vec<(usize, usize, f64)>,
}

/// Result of [`CapGraph::min_st_cut`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    /// Total capacity of the edges crossing the partition.
    pub value: f64,
    /// Maximum flow value found; equals `value` up to rounding.
    pub flow: f64,
    /// `source_side[v]` is true for vertices on the source side. This is the
    /// smallest minimum-cut source side (reachability in the final residual
    /// graph).
    pub source_side: Vec<bool>,
}

impl MinCut {
    pub fn source_vertices(&self) -> Vec<usize> {
        (0..self.source_side.len())
            .filter(|&v| self.source_side[v])
            .collect()
    }

    pub fn sink_vertices(&self) -> Vec<usize> {
        (0..self.source_side.len())
            .filter(|&v| !self.source_side[v])
            .collect()
    }
}

impl CapGraph {
    pub fn new(n: usize) -> Self {
        CapGraph {
            n,
            ..Default::default()
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, a: usize, b: usize, cap: f64) {
        assert!(a < self.n && b < self.n, "edge ({a}, {b}) out of range");
        assert!(cap >= 0.0, "negative capacity {cap}");
        if a == b {
            return;
        }
        let key = (a.min(b), a.max(b));
        match self.index.get(&key) {
            Some(&k) => self.edges[k].2 += cap,
            None => {
                self.index.insert(key, self.edges.len());
                self.edges.push((key.0, key.1, cap));
            }
        }
    }

    pub fn capacity(&self, a: usize, b: usize) -> f64 {
        self.index
            .get(&(a.min(b), a.max(b)))
            .map_or(0.0, |&k| self.edges[k].2)
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn total_capacity(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Components over the edges of positive capacity, each sorted, ordered
    /// by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (v, &l) in labels.iter().enumerate() {
            let k = *slot.entry(l).or_insert_with(|| {
                comps.push(Vec::new());
                comps.len() - 1
            });
            comps[k].push(v);
        }
        comps
    }

    /// Component label of every vertex (the smallest vertex of its component).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &(a, b, c) in &self.edges {
            if c > 0.0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    let (lo, hi) = (ra.min(rb), ra.max(rb));
                    parent[hi] = lo;
                }
            }
        }
        (0..self.n).map(|v| find(&mut parent, v)).collect()
    }

    /// Capacity of the edges with exactly one end in `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|&&(a, b, _)| side[a] != side[b])
            .map(|e| e.2)
            .sum()
    }

    /// Exact minimum s–t cut by Dinic's algorithm.
    pub fn min_st_cut(&self, s: usize, t: usize) -> MinCut {
        self.min_st_cut_with(s, t, &[])
    }

    /// Minimum s–t cut of this graph plus the `extra` edges, without
    /// modifying it.
    pub fn min_st_cut_with(&self, s: usize, t: usize, extra: &[(usize, usize, f64)]) -> MinCut {
        assert!(s != t, "source and sink must differ");
        assert!(s < self.n && t < self.n);
        let mut net = Dinic::new(self.n);
        for &(a, b, c) in self.edges.iter().chain(extra) {
            assert!(a < self.n && b < self.n && c >= 0.0);
            if c > 0.0 && a != b {
                net.add_undirected(a, b, c);
            }
        }
        let flow = net.max_flow(s, t);
        let source_side = net.reachable(s);
        let value = self.cut_capacity(&source_side)
            + extra
                .iter()
                .filter(|&&(a, b, _)| source_side[a] != source_side[b])
                .map(|e| e.2)
                .sum::<f64>();
        MinCut {
            value,
            flow,
            source_side,
        }
    }
}

struct Arc {
    to: usize,
    rev: usize,
    cap: f64,
}

struct Dinic {
    adj: Vec<Vec<Arc>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            adj: (0..n).map(|_| Vec::new()).collect(),
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_undirected(&mut self, a: usize, b: usize, cap: f64) {
        let ra = self.adj[b].len();
        let rb = self.adj[a].len();
        self.adj[a].push(Arc { to: b, rev: ra, cap });
        self.adj[b].push(Arc { to: a, rev: rb, cap });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for arc in &self.adj[v] {
                if arc.cap > RESIDUAL_EPS && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: f64) -> f64 {
        if v == t {
            return pushed;
        }
        while self.iter[v] < self.adj[v].len() {
            let i = self.iter[v];
            let (to, cap) = (self.adj[v][i].to, self.adj[v][i].cap);
            if cap > RESIDUAL_EPS && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0.0 {
                    self.adj[v][i].cap -= d;
                    let rev = self.adj[v][i].rev;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for arc in &self.adj[v] {
                if arc.cap > RESIDUAL_EPS && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn components() {
        let mut g = CapGraph::new(3);
        g.add_edge(0, 1, 1.0);
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2]]);
        let g = CapGraph::new(3);
        assert_eq!(g.connected_components(), vec![vec![0], vec![1], vec![2]]);
        let mut g = CapGraph::new(5);
        g.add_edge(0, 1, 0.5);
        g.add_edge(1, 2, 0.5);
        g.add_edge(2, 0, 0.5);
        g.add_edge(3, 4, 2.0);
        assert_eq!(g.connected_components(), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn zero_capacity_edges_do_not_connect() {
        let mut g = CapGraph::new(2);
        g.add_edge(0, 1, 0.0);
        assert_eq!(g.connected_components().len(), 2);
    }

    #[test]
    fn parallel_edges_merge() {
        let mut g = CapGraph::new(2);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 0, 2.5);
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.capacity(0, 1), 3.5);
    }

    #[test]
    fn small_cuts() {
        let mut g = CapGraph::new(2);
        g.add_edge(0, 1, 3.0);
        let c = g.min_st_cut(0, 1);
        assert_eq!(c.value, 3.0);
        assert_eq!(c.source_vertices(), vec![0]);

        // s=0, a=1, t=2
        let mut g = CapGraph::new(3);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 2.0);
        let c = g.min_st_cut(0, 2);
        assert_eq!(c.value, 1.0);
        assert_eq!(c.source_vertices(), vec![0]);

        g.add_edge(0, 2, 1.0);
        let c = g.min_st_cut(0, 2);
        assert_eq!(c.value, 2.0);
        assert_eq!(c.source_vertices(), vec![0]);
    }

    #[test]
    fn extra_edges_match_a_modified_copy() {
        let mut g = CapGraph::new(4);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 3, 2.0);
        g.add_edge(2, 3, 0.5);
        let extra = [(0, 2, 4.0), (1, 2, 1.0)];
        let mut h = g.clone();
        for &(a, b, c) in &extra {
            h.add_edge(a, b, c);
        }
        let (x, y) = (g.min_st_cut_with(0, 3, &extra), h.min_st_cut(0, 3));
        assert_eq!(x.value, y.value);
        assert_eq!(x.source_side, y.source_side);
        assert_eq!(x.value, 2.5);
    }

    #[test]
    fn disconnected_terminals() {
        let mut g = CapGraph::new(4);
        g.add_edge(0, 1, 1.0);
        g.add_edge(2, 3, 1.0);
        let c = g.min_st_cut(0, 3);
        assert_eq!(c.value, 0.0);
        assert_eq!(c.source_vertices(), vec![0, 1]);
    }

    fn brute_force(g: &CapGraph, s: usize, t: usize) -> f64 {
        let n = g.n_vertices();
        let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << others.len()) {
            let mut side = vec![false; n];
            side[s] = true;
            for (k, &v) in others.iter().enumerate() {
                side[v] = mask >> k & 1 == 1;
            }
            best = best.min(g.cut_capacity(&side));
        }
        best
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            n in 2usize..9,
            raw in prop::collection::vec((0usize..9, 0usize..9, 0.0f64..5.0), 0..30),
            st in (0usize..9, 0usize..9),
        ) {
            let mut g = CapGraph::new(n);
            for (a, b, c) in raw {
                g.add_edge(a % n, b % n, c);
            }
            let s = st.0 % n;
            let t = if st.1 % n == s { (s + 1) % n } else { st.1 % n };
            let cut = g.min_st_cut(s, t);
            prop_assert!(cut.source_side[s] && !cut.source_side[t]);
            prop_assert!((cut.value - cut.flow).abs() <= 1e-9);
            prop_assert!((cut.value - brute_force(&g, s, t)).abs() <= 1e-9);
        }
    }
}
