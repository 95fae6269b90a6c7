//! Canonical column layout of the incidence vector.
//!
//! Vertices are numbered customers first (`0..u`), then depots (`u..u+n`).
//! Columns are ordered as: customer–customer edges in lexicographic order,
//! depot–customer edges ordered by `(customer, depot)`, then every arc `[i, j]`
//! of the formulation in lexicographic `(i, j)` order. Depot–depot edges and
//! arcs between two distinct depots are not part of the model.

use serde::{Deserialize, Serialize};

/// What a column of the model represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    /// Routing edge between two vertices, stored with `a < b`.
    Edge(usize, usize),
    /// Assignment arc `[i, j]` (`i == j` is a self-loop).
    Arc(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Layout {
    u: usize,
    n: usize,
}

impl Layout {
    pub fn new(n_customers: usize, n_depots: usize) -> Self {
        Layout {
            u: n_customers,
            n: n_depots,
        }
    }

    pub fn n_customers(&self) -> usize {
        self.u
    }

    pub fn n_depots(&self) -> usize {
        self.n
    }

    pub fn n_vertices(&self) -> usize {
        self.u + self.n
    }

    pub fn customers(&self) -> std::ops::Range<usize> {
        0..self.u
    }

    pub fn depots(&self) -> std::ops::Range<usize> {
        self.u..self.u + self.n
    }

    pub fn is_depot(&self, v: usize) -> bool {
        v >= self.u && v < self.u + self.n
    }

    pub fn is_customer(&self, v: usize) -> bool {
        v < self.u
    }

    fn n_cc(&self) -> usize {
        self.u * self.u.saturating_sub(1) / 2
    }

    fn dc_offset(&self) -> usize {
        self.n_cc()
    }

    /// First arc column.
    pub fn arc_offset(&self) -> usize {
        self.n_cc() + self.u * self.n
    }

    fn depot_arc_offset(&self) -> usize {
        self.arc_offset() + self.u * (self.u + self.n)
    }

    /// Number of edge (x) columns.
    pub fn n_edges(&self) -> usize {
        self.arc_offset()
    }

    /// Total number of columns, `C(u,2) + u² + n + 3nu`.
    pub fn len(&self) -> usize {
        self.depot_arc_offset() + self.n * (self.u + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column of the routing edge between `a` and `b`, if the model has one.
    pub fn edge(&self, a: usize, b: usize) -> Option<usize> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if a == b || b >= self.n_vertices() {
            return None;
        }
        if b < self.u {
            Some(a * self.u - a * (a + 1) / 2 + (b - a - 1))
        } else if a < self.u {
            Some(self.dc_offset() + a * self.n + (b - self.u))
        } else {
            None
        }
    }

    /// Column of the assignment arc `[i, j]`, if the model has one.
    pub fn arc(&self, i: usize, j: usize) -> Option<usize> {
        let nv = self.n_vertices();
        if i >= nv || j >= nv {
            return None;
        }
        if i < self.u {
            Some(self.arc_offset() + i * nv + j)
        } else if j < self.u {
            Some(self.depot_arc_offset() + (i - self.u) * (self.u + 1) + j)
        } else if i == j {
            Some(self.depot_arc_offset() + (i - self.u) * (self.u + 1) + self.u)
        } else {
            None
        }
    }

    pub fn column(&self, idx: usize) -> Column {
        assert!(idx < self.len(), "column {idx} out of range");
        if idx < self.dc_offset() {
            // invert the triangular index
            let mut a = 0;
            let mut start = 0;
            loop {
                let row = self.u - a - 1;
                if idx < start + row {
                    return Column::Edge(a, a + 1 + idx - start);
                }
                start += row;
                a += 1;
            }
        } else if idx < self.arc_offset() {
            let k = idx - self.dc_offset();
            Column::Edge(k / self.n, self.u + k % self.n)
        } else if idx < self.depot_arc_offset() {
            let k = idx - self.arc_offset();
            let nv = self.n_vertices();
            Column::Arc(k / nv, k % nv)
        } else {
            let k = idx - self.depot_arc_offset();
            let d = self.u + k / (self.u + 1);
            let j = k % (self.u + 1);
            Column::Arc(d, if j == self.u { d } else { j })
        }
    }

    pub fn is_edge_column(&self, idx: usize) -> bool {
        idx < self.arc_offset()
    }

    /// Routing edges incident to `v`, as `(other endpoint, column)`.
    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let depot = self.is_depot(v);
        (0..self.n_vertices())
            .filter(move |&w| w != v && !(depot && self.is_depot(w)))
            .filter_map(move |w| self.edge(v, w).map(|c| (w, c)))
    }
}
