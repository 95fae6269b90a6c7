//! Problem data: base distances, instances, solutions and their incidence
//! vectors.

mod io;
mod layout;
mod solution;
mod tsplib;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{InstanceFile, SolutionFile};
pub use layout::{Column, Layout};
pub use solution::{IncidenceVector, Ring, Solution, Violation};
pub use tsplib::parse_tsplib;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("unsupported weight type {0}")]
    UnsupportedWeightType(String),
    #[error("unsupported edge weight format {0:?}")]
    UnsupportedWeightFormat(String),
    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed numeric token {token:?} on line {line}")]
    MalformedNumber { token: String, line: usize },
    #[error("missing {0}")]
    MissingField(&'static str),
    #[error("cost matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("negative cost at ({i}, {j})")]
    Negative { i: usize, j: usize },
    #[error("cannot place depots: base has no coordinates")]
    NoCoordinates,
    #[error("scale factor must be one of 3, 5, 7, 9 for class II (got {0:?})")]
    InvalidAlpha(Option<u32>),
    #[error("an instance needs at least one depot and one customer")]
    Empty,
    #[error("infeasible solution: {0:?}")]
    Infeasible(Vec<Violation>),
    #[error("invalid instance file: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Where the base distances `l_ij` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceSource {
    /// `EUC_2D` node coordinates.
    Euc2d,
    /// Display coordinates of an explicit-matrix file.
    Display,
    /// Explicit matrix entries.
    Explicit,
    /// Entered directly (hand-made or synthetic instances).
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
enum Base {
    Points(Vec<[f64; 2]>),
    Matrix(Vec<Vec<f64>>),
}

/// Base distances `l_ij` over a vertex set, from either planar points or an
/// explicit symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    name: Option<String>,
    base: Base,
    source: DistanceSource,
}

impl CostModel {
    pub fn from_coordinates(
        name: Option<String>,
        points: Vec<[f64; 2]>,
        source: DistanceSource,
    ) -> Self {
        CostModel {
            name,
            base: Base::Points(points),
            source,
        }
    }

    pub fn from_matrix(name: Option<String>, matrix: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        let dim = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != dim {
                return Err(InstanceError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 {
                    return Err(InstanceError::Negative { i, j });
                }
                if v != matrix[j][i] {
                    return Err(InstanceError::Asymmetric { i, j });
                }
            }
        }
        let mut matrix = matrix;
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        Ok(CostModel {
            name,
            base: Base::Matrix(matrix),
            source: DistanceSource::Explicit,
        })
    }

    /// `count` points drawn uniformly from `[0, extent)²`, rounded to integers
    /// like most TSPLIB coordinate files.
    pub fn random_points(count: usize, extent: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                [
                    rng.gen_range(0.0..extent).floor(),
                    rng.gen_range(0.0..extent).floor(),
                ]
            })
            .collect();
        CostModel::from_coordinates(None, points, DistanceSource::Euc2d)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        match &self.base {
            Base::Points(p) => p.len(),
            Base::Matrix(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self) -> DistanceSource {
        self.source
    }

    pub fn coordinates(&self) -> Option<&[[f64; 2]]> {
        match &self.base {
            Base::Points(p) => Some(p),
            Base::Matrix(_) => None,
        }
    }

    pub fn base_distance(&self, i: usize, j: usize) -> f64 {
        match &self.base {
            Base::Points(p) => euclid(p[i], p[j]),
            Base::Matrix(m) => m[i][j],
        }
    }

    /// Writes the model back out as a TSPLIB file.
    pub fn to_tsplib(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "NAME : {}", self.name.as_deref().unwrap_or("unnamed"));
        let _ = writeln!(s, "TYPE : TSP");
        let _ = writeln!(s, "DIMENSION : {}", self.len());
        match &self.base {
            Base::Points(p) => {
                let _ = writeln!(s, "EDGE_WEIGHT_TYPE : EUC_2D");
                let _ = writeln!(s, "NODE_COORD_SECTION");
                for (k, q) in p.iter().enumerate() {
                    let _ = writeln!(s, "{} {} {}", k + 1, q[0], q[1]);
                }
            }
            Base::Matrix(m) => {
                let _ = writeln!(s, "EDGE_WEIGHT_TYPE : EXPLICIT");
                let _ = writeln!(s, "EDGE_WEIGHT_FORMAT : FULL_MATRIX");
                let _ = writeln!(s, "EDGE_WEIGHT_SECTION");
                for row in m {
                    let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(s, "{}", line.join(" "));
                }
            }
        }
        s.push_str("EOF\n");
        s
    }
}

pub(crate) fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Rounds to 10 significant digits, the precision used in instance files.
pub(crate) fn round_sig10(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.9e}").parse().unwrap_or(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    /// `c_ij = d_ij = l_ij`.
    I,
    /// `c_ij = α l_ij`, `d_ij = (10 − α) l_ij`.
    II,
}

impl std::fmt::Display for ClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassTag::I => "I",
            ClassTag::II => "II",
        })
    }
}

impl std::str::FromStr for ClassTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "I" | "i" | "1" => Ok(ClassTag::I),
            "II" | "ii" | "2" => Ok(ClassTag::II),
            _ => Err(format!("unknown class {s:?} (expected I or II)")),
        }
    }
}

/// Routing and assignment cost multipliers applied to the base distance.
pub fn class_factors(class: ClassTag, alpha: Option<u32>) -> Result<(f64, f64), InstanceError> {
    match class {
        ClassTag::I => Ok((1.0, 1.0)),
        ClassTag::II => match alpha {
            Some(a @ (3 | 5 | 7 | 9)) => Ok((a as f64, (10 - a) as f64)),
            other => Err(InstanceError::InvalidAlpha(other)),
        },
    }
}

/// Planar positions of all vertices, kept when the instance was built from
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub customers: Vec<[f64; 2]>,
    pub depots: Vec<[f64; 2]>,
}

/// An MDRSP instance. Vertices `0..u` are customers and `u..u+n` depots.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    layout: Layout,
    routing: Vec<f64>,
    assignment: Vec<f64>,
    class: ClassTag,
    alpha: Option<u32>,
    seed: Option<u64>,
    geometry: Option<Geometry>,
    source: DistanceSource,
}

impl Instance {
    /// Builds an instance from full `(u+n) × (u+n)` cost matrices.
    ///
    /// Routing costs must be symmetric; both matrices must be nonnegative.
    /// Diagonal assignment entries are kept as given.
    pub fn from_matrices(
        name: impl Into<String>,
        n_customers: usize,
        n_depots: usize,
        routing: Vec<Vec<f64>>,
        assignment: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        if n_customers == 0 || n_depots == 0 {
            return Err(InstanceError::Empty);
        }
        let nv = n_customers + n_depots;
        let flat = |m: Vec<Vec<f64>>, symmetric: bool| -> Result<Vec<f64>, InstanceError> {
            if m.len() != nv {
                return Err(InstanceError::DimensionMismatch {
                    expected: nv,
                    found: m.len(),
                });
            }
            let mut out = Vec::with_capacity(nv * nv);
            for (i, row) in m.iter().enumerate() {
                if row.len() != nv {
                    return Err(InstanceError::DimensionMismatch {
                        expected: nv,
                        found: row.len(),
                    });
                }
                for (j, &v) in row.iter().enumerate() {
                    if v < 0.0 || !v.is_finite() {
                        return Err(InstanceError::Negative { i, j });
                    }
                    if symmetric && i != j && v != m[j][i] {
                        return Err(InstanceError::Asymmetric { i, j });
                    }
                    out.push(v);
                }
            }
            Ok(out)
        };
        let routing = flat(routing, true)?;
        let assignment = flat(assignment, false)?;
        Ok(Instance {
            name: name.into(),
            layout: Layout::new(n_customers, n_depots),
            routing,
            assignment,
            class: ClassTag::I,
            alpha: None,
            seed: None,
            geometry: None,
            source: DistanceSource::Direct,
        })
    }

    /// Builds an instance from customer and depot coordinates using the class
    /// cost formulas.
    pub fn from_geometry(
        name: impl Into<String>,
        geometry: Geometry,
        class: ClassTag,
        alpha: Option<u32>,
        seed: Option<u64>,
        source: DistanceSource,
    ) -> Result<Self, InstanceError> {
        let (fc, fd) = class_factors(class, alpha)?;
        let u = geometry.customers.len();
        let n = geometry.depots.len();
        if u == 0 || n == 0 {
            return Err(InstanceError::Empty);
        }
        let pts: Vec<[f64; 2]> = geometry
            .customers
            .iter()
            .chain(geometry.depots.iter())
            .copied()
            .collect();
        let nv = u + n;
        let mut routing = vec![0.0; nv * nv];
        let mut assignment = vec![0.0; nv * nv];
        for i in 0..nv {
            for j in 0..nv {
                let l = euclid(pts[i], pts[j]);
                routing[i * nv + j] = fc * l;
                assignment[i * nv + j] = fd * l;
            }
        }
        Ok(Instance {
            name: name.into(),
            layout: Layout::new(u, n),
            routing,
            assignment,
            class,
            alpha: if class == ClassTag::II { alpha } else { None },
            seed,
            geometry: Some(geometry),
            source,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn n_customers(&self) -> usize {
        self.layout.n_customers()
    }

    pub fn n_depots(&self) -> usize {
        self.layout.n_depots()
    }

    pub fn n_vertices(&self) -> usize {
        self.layout.n_vertices()
    }

    pub fn customers(&self) -> std::ops::Range<usize> {
        self.layout.customers()
    }

    pub fn depots(&self) -> std::ops::Range<usize> {
        self.layout.depots()
    }

    pub fn is_depot(&self, v: usize) -> bool {
        self.layout.is_depot(v)
    }

    pub fn class(&self) -> ClassTag {
        self.class
    }

    pub fn alpha(&self) -> Option<u32> {
        self.alpha
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn geometry(&self) -> Option<&Geometry> {
        self.geometry.as_ref()
    }

    pub fn distance_source(&self) -> DistanceSource {
        self.source
    }

    /// Routing cost `c_ij`.
    #[inline]
    pub fn routing_cost(&self, i: usize, j: usize) -> f64 {
        self.routing[i * self.n_vertices() + j]
    }

    /// Assignment cost `d_ij` of arc `[i, j]`.
    #[inline]
    pub fn assignment_cost(&self, i: usize, j: usize) -> f64 {
        self.assignment[i * self.n_vertices() + j]
    }

    /// Objective coefficient of every column in the canonical layout.
    pub fn objective(&self) -> Vec<f64> {
        let l = self.layout;
        (0..l.len())
            .map(|idx| match l.column(idx) {
                Column::Edge(a, b) => self.routing_cost(a, b),
                Column::Arc(i, j) => {
                    if l.is_depot(i) {
                        0.0
                    } else {
                        self.assignment_cost(i, j)
                    }
                }
            })
            .collect()
    }

    pub fn nearest_depot(&self, t: usize) -> usize {
        self.depots()
            .min_by(|&a, &b| {
                self.assignment_cost(t, a)
                    .total_cmp(&self.assignment_cost(t, b))
                    .then(a.cmp(&b))
            })
            .expect("instance has a depot")
    }
}

/// Places `n_depots` depots uniformly at random in the bounding box of the
/// base coordinates and applies the class cost formulas.
///
/// Deterministic for a fixed seed. Depot coordinates are rounded to 10
/// significant digits so the in-memory instance equals its serialized form.
pub fn generate_instance(
    base: &CostModel,
    n_depots: usize,
    class: ClassTag,
    alpha: Option<u32>,
    seed: u64,
) -> Result<Instance, InstanceError> {
    class_factors(class, alpha)?;
    if n_depots == 0 || base.is_empty() {
        return Err(InstanceError::Empty);
    }
    let pts = base.coordinates().ok_or(InstanceError::NoCoordinates)?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depots = (0..n_depots)
        .map(|_| {
            let mut q = [0.0; 2];
            for k in 0..2 {
                let r: f64 = rng.gen();
                q[k] = round_sig10(lo[k] + r * (hi[k] - lo[k]));
            }
            q
        })
        .collect();
    let geometry = Geometry {
        customers: pts.iter().map(|p| [round_sig10(p[0]), round_sig10(p[1])]).collect(),
        depots,
    };
    let name = base.name().unwrap_or("instance").to_string();
    Instance::from_geometry(name, geometry, class, alpha, Some(seed), base.source())
}
