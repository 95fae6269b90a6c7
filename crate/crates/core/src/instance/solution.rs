use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Column, Instance, InstanceError, Layout};

/// A simple cycle through one depot, given by its customers in cyclic order.
/// A single customer denotes the degenerate ring that uses the depot edge
/// twice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    pub depot: usize,
    pub customers: Vec<usize>,
}

impl Ring {
    pub fn new(depot: usize, customers: Vec<usize>) -> Self {
        Ring { depot, customers }
    }

    /// Routing edges of the ring (with multiplicity).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut walk = Vec::with_capacity(self.customers.len() + 2);
        walk.push(self.depot);
        walk.extend_from_slice(&self.customers);
        walk.push(self.depot);
        walk.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn routing_cost(&self, inst: &Instance) -> f64 {
        if self.customers.is_empty() {
            return 0.0;
        }
        self.edges()
            .into_iter()
            .map(|(a, b)| inst.routing_cost(a, b))
            .sum()
    }

    fn normalize(&mut self) {
        if self.customers.len() > 1 && self.customers[0] > *self.customers.last().unwrap() {
            self.customers.reverse();
        }
    }
}

/// A ring-star solution: rings plus the star assignments of the customers that
/// are not on any ring.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Solution {
    pub rings: Vec<Ring>,
    /// `customer → target` for every customer off the rings.
    pub assignments: BTreeMap<usize, usize>,
}

/// A rule broken by a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Violation {
    UnknownVertex,
    RingDepot,
    Degree,
    UniqueAssignment,
    DepotArc,
    Subtour,
    PathElimination,
    AssignmentTarget,
}

impl Violation {
    pub fn id(&self) -> &'static str {
        match self {
            Violation::UnknownVertex => "unknown-vertex",
            Violation::RingDepot => "ring-depot",
            Violation::Degree => "degree",
            Violation::UniqueAssignment => "unique-assignment",
            Violation::DepotArc => "depot-arc",
            Violation::Subtour => "subtour",
            Violation::PathElimination => "path-elimination",
            Violation::AssignmentTarget => "assignment-target",
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl Solution {
    /// Every customer assigned to its cheapest depot; always feasible.
    pub fn all_to_nearest_depot(inst: &Instance) -> Self {
        Solution {
            rings: Vec::new(),
            assignments: inst.customers().map(|t| (t, inst.nearest_depot(t))).collect(),
        }
    }

    /// `σ(i)`: `i` itself for ring customers, the star target otherwise.
    pub fn sigma(&self, i: usize) -> Option<usize> {
        if self.rings.iter().any(|r| r.customers.contains(&i)) {
            Some(i)
        } else {
            self.assignments.get(&i).copied()
        }
    }

    /// Ring costs plus assignment costs. Ring customers also pay their
    /// self-arc cost `d_ii` (zero on generated instances).
    pub fn cost(&self, inst: &Instance) -> f64 {
        let ring: f64 = self
            .rings
            .iter()
            .map(|r| {
                r.routing_cost(inst)
                    + r.customers
                        .iter()
                        .map(|&t| inst.assignment_cost(t, t))
                        .sum::<f64>()
            })
            .sum();
        let star: f64 = self
            .assignments
            .iter()
            .map(|(&i, &j)| inst.assignment_cost(i, j))
            .sum();
        ring + star
    }

    /// Checks the solution against the formulation; an empty result means
    /// feasible. Several rings may share a depot, and customers may be
    /// assigned to any depot.
    pub fn check_feasible(&self, inst: &Instance) -> Vec<Violation> {
        let l = inst.layout();
        let u = l.n_customers();
        let mut out = Vec::new();
        let mut count = vec![0usize; u];
        let mut on_ring = vec![false; u];

        for ring in &self.rings {
            if !l.is_depot(ring.depot) {
                out.push(if ring.depot < l.n_vertices() {
                    Violation::RingDepot
                } else {
                    Violation::UnknownVertex
                });
            }
            if ring.customers.is_empty() {
                out.push(Violation::Degree);
            }
            let mut seen = Vec::new();
            for &t in &ring.customers {
                if l.is_depot(t) {
                    out.push(Violation::PathElimination);
                } else if t >= u {
                    out.push(Violation::UnknownVertex);
                } else if seen.contains(&t) {
                    out.push(Violation::Degree);
                } else {
                    seen.push(t);
                    count[t] += 1;
                    on_ring[t] = true;
                }
            }
        }
        for (&i, &j) in &self.assignments {
            if i >= u {
                out.push(Violation::UnknownVertex);
                continue;
            }
            count[i] += 1;
            if j >= l.n_vertices() {
                out.push(Violation::UnknownVertex);
            } else if i == j {
                if !on_ring[i] {
                    out.push(Violation::AssignmentTarget);
                } else {
                    // listed both on a ring and as self-assigned: same thing
                    count[i] -= 1;
                }
            } else if !(l.is_depot(j) || on_ring[j]) {
                out.push(Violation::AssignmentTarget);
            }
        }
        if count.iter().any(|&c| c != 1) {
            out.push(Violation::UniqueAssignment);
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.check_feasible(inst).is_empty()
    }

    /// Incidence vector `(x, y)` in the canonical layout.
    pub fn to_incidence(&self, inst: &Instance) -> Result<IncidenceVector, InstanceError> {
        let v = self.check_feasible(inst);
        if !v.is_empty() {
            return Err(InstanceError::Infeasible(v));
        }
        let l = inst.layout();
        let mut values = vec![0i8; l.len()];
        for ring in &self.rings {
            for (a, b) in ring.edges() {
                values[l.edge(a, b).expect("ring edge")] += 1;
            }
            for &t in &ring.customers {
                values[l.arc(t, t).unwrap()] = 1;
            }
        }
        for (&i, &j) in &self.assignments {
            values[l.arc(i, j).unwrap()] = 1;
        }
        for d in l.depots() {
            values[l.arc(d, d).unwrap()] = 1;
        }
        Ok(IncidenceVector { layout: l, values })
    }

    /// Reads a solution off an integral incidence vector.
    ///
    /// A 2-path `d1 – t – d2` is allowed by the formulation; it is replaced by
    /// the degenerate ring on whichever of the two depots is cheaper for `t`
    /// (the lower-numbered depot on ties or without costs), which never costs
    /// more.
    pub fn from_incidence(
        v: &IncidenceVector,
        inst: Option<&Instance>,
    ) -> Result<Solution, Vec<Violation>> {
        let l = v.layout;
        let u = l.n_customers();
        let nv = l.n_vertices();
        let mut bad = Vec::new();

        for d in l.depots() {
            if v.y(d, d) != 1 || l.customers().any(|t| v.y(d, t) != 0) {
                bad.push(Violation::DepotArc);
            }
        }
        for t in l.customers() {
            let deg: i32 = l.incident_edges(t).map(|(_, c)| v.values[c] as i32).sum();
            if deg != 2 * v.y(t, t) as i32 {
                bad.push(Violation::Degree);
            }
            let out: i32 = (0..nv).map(|j| v.y(t, j) as i32).sum();
            if out != 1 {
                bad.push(Violation::UniqueAssignment);
            }
        }
        if !bad.is_empty() {
            bad.sort();
            bad.dedup();
            return Err(bad);
        }

        // remaining edge multiplicities
        let mut mult: Vec<i8> = v.values[..l.n_edges()].to_vec();
        let mut rings = Vec::new();
        let mut visited = vec![false; u];
        for d in l.depots() {
            for t in l.customers() {
                while mult[l.edge(d, t).unwrap()] > 0 {
                    mult[l.edge(d, t).unwrap()] -= 1;
                    let mut path = vec![t];
                    let mut cur = t;
                    let end = loop {
                        visited[cur] = true;
                        let next = l
                            .incident_edges(cur)
                            .find(|&(_, c)| mult[c] > 0);
                        let Some((w, c)) = next else {
                            // degree already checked; unreachable for valid input
                            bad.push(Violation::Degree);
                            break None;
                        };
                        mult[c] -= 1;
                        if l.is_depot(w) {
                            break Some(w);
                        }
                        path.push(w);
                        cur = w;
                    };
                    let Some(end) = end else { continue };
                    if end == d {
                        rings.push(Ring::new(d, path));
                    } else if path.len() == 1 {
                        let keep = match inst {
                            Some(inst) if inst.routing_cost(end, t) < inst.routing_cost(d, t) => end,
                            _ => d.min(end),
                        };
                        rings.push(Ring::new(keep, path));
                    } else {
                        bad.push(Violation::PathElimination);
                    }
                }
            }
        }
        for t in l.customers() {
            if v.y(t, t) == 1 && !visited[t] {
                bad.push(Violation::Subtour);
            }
        }
        let mut assignments = BTreeMap::new();
        for t in l.customers() {
            if v.y(t, t) == 1 {
                continue;
            }
            let j = (0..nv).find(|&j| v.y(t, j) == 1).unwrap();
            if !(l.is_depot(j) || visited[j]) {
                bad.push(Violation::AssignmentTarget);
            }
            assignments.insert(t, j);
        }
        if !bad.is_empty() {
            bad.sort();
            bad.dedup();
            return Err(bad);
        }
        let mut sol = Solution { rings, assignments };
        sol.normalize();
        Ok(sol)
    }

    /// Canonical form: each ring oriented with its smaller end customer first,
    /// rings sorted by depot then first customer.
    pub fn normalize(&mut self) {
        for r in &mut self.rings {
            r.normalize();
        }
        self.rings
            .sort_by(|a, b| (a.depot, &a.customers).cmp(&(b.depot, &b.customers)));
    }

    /// Customers on some ring, sorted.
    pub fn ring_customers(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rings.iter().flat_map(|r| r.customers.clone()).collect();
        v.sort_unstable();
        v
    }
}

/// Integral point `(x, y)` in the canonical column layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IncidenceVector {
    layout: Layout,
    values: Vec<i8>,
}

impl IncidenceVector {
    pub fn new(layout: Layout, values: Vec<i8>) -> Self {
        assert_eq!(values.len(), layout.len());
        IncidenceVector { layout, values }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn into_values(self) -> Vec<i8> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, a: usize, b: usize) -> i8 {
        self.layout.edge(a, b).map_or(0, |c| self.values[c])
    }

    pub fn y(&self, i: usize, j: usize) -> i8 {
        self.layout.arc(i, j).map_or(0, |c| self.values[c])
    }

    /// Objective value under the instance costs.
    pub fn objective(&self, inst: &Instance) -> f64 {
        inst.objective()
            .iter()
            .zip(&self.values)
            .map(|(c, &v)| c * v as f64)
            .sum()
    }

    /// Largest absolute residual over the equality system: degree rows,
    /// assignment rows and the depot arc fixings.
    pub fn equality_residual(&self) -> i32 {
        let l = self.layout;
        let mut worst = 0i32;
        for t in l.customers() {
            let deg: i32 = l.incident_edges(t).map(|(_, c)| self.values[c] as i32).sum();
            worst = worst.max((deg - 2 * self.y(t, t) as i32).abs());
            let out: i32 = (0..l.n_vertices()).map(|j| self.y(t, j) as i32).sum();
            worst = worst.max((out - 1).abs());
        }
        for d in l.depots() {
            worst = worst.max((self.y(d, d) as i32 - 1).abs());
            for t in l.customers() {
                worst = worst.max((self.y(d, t) as i32).abs());
            }
        }
        worst
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (c, &v) in self.values.iter().enumerate() {
            if v != 0 {
                match self.layout.column(c) {
                    Column::Edge(a, b) => parts.push(format!("x({a},{b})={v}")),
                    Column::Arc(i, j) if self.layout.is_customer(i) => {
                        parts.push(format!("y[{i},{j}]={v}"))
                    }
                    Column::Arc(..) => {}
                }
            }
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Customers 0,1,2 (a, b, z), one depot 3 (r).
    fn small() -> Instance {
        let mut c = vec![vec![0.0; 4]; 4];
        let mut set = |i: usize, j: usize, v: f64| {
            c[i][j] = v;
            c[j][i] = v;
        };
        set(3, 0, 3.0);
        set(0, 1, 4.0);
        set(1, 3, 5.0);
        set(2, 0, 9.0);
        set(2, 1, 9.0);
        set(2, 3, 9.0);
        let mut d = vec![vec![7.0; 4]; 4];
        d[2][0] = 2.0;
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        Instance::from_matrices("small", 3, 1, c, d).unwrap()
    }

    #[test]
    fn cost_of_degenerate_ring() {
        let inst = Instance::from_matrices(
            "one",
            1,
            1,
            vec![vec![0.0, 5.0], vec![5.0, 0.0]],
            vec![vec![0.0, 20.0], vec![20.0, 0.0]],
        )
        .unwrap();
        let sol = Solution {
            rings: vec![Ring::new(1, vec![0])],
            assignments: BTreeMap::new(),
        };
        assert_eq!(sol.cost(&inst), 10.0);
        let v = sol.to_incidence(&inst).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.x(0, 1), 2);
        assert_eq!(v.y(0, 0), 1);
        let star = Solution {
            rings: vec![],
            assignments: [(0, 1)].into(),
        };
        let v = star.to_incidence(&inst).unwrap();
        assert_eq!(v.values(), &[0, 0, 1, 0, 1]);
    }

    #[test]
    fn cost_of_ring_star() {
        let inst = small();
        let sol = Solution {
            rings: vec![Ring::new(3, vec![0, 1])],
            assignments: [(2, 0)].into(),
        };
        assert!(sol.is_feasible(&inst));
        assert_eq!(sol.cost(&inst), 14.0);
        let v = sol.to_incidence(&inst).unwrap();
        assert_eq!(v.objective(&inst), 14.0);
        assert_eq!(v.equality_residual(), 0);
        assert_eq!(v.y(2, 0), 1);
        assert_eq!(v.x(2, 0) + v.x(2, 1) + v.x(2, 3), 0);
        let back = Solution::from_incidence(&v, Some(&inst)).unwrap();
        assert_eq!(back.to_incidence(&inst).unwrap(), v);
    }

    #[test]
    fn routing_only_solution() {
        let inst = small();
        let sol = Solution {
            rings: vec![Ring::new(3, vec![0, 2, 1])],
            assignments: BTreeMap::new(),
        };
        assert_eq!(sol.cost(&inst), 3.0 + 9.0 + 9.0 + 5.0);
    }

    #[test]
    fn detects_violations() {
        let inst = small();
        let dangling = Solution {
            rings: vec![Ring::new(3, vec![0])],
            assignments: [(1, 2), (2, 3)].into(),
        };
        assert_eq!(dangling.check_feasible(&inst), vec![Violation::AssignmentTarget]);

        let inst2 = Instance::from_matrices(
            "two",
            2,
            2,
            vec![vec![1.0; 4]; 4],
            vec![vec![1.0; 4]; 4],
        )
        .unwrap();
        let two_depots = Solution {
            rings: vec![Ring::new(2, vec![0, 3, 1])],
            assignments: BTreeMap::new(),
        };
        assert!(two_depots
            .check_feasible(&inst2)
            .contains(&Violation::PathElimination));

        let missing = Solution {
            rings: vec![Ring::new(3, vec![0])],
            assignments: [(2, 3)].into(),
        };
        assert_eq!(missing.check_feasible(&inst), vec![Violation::UniqueAssignment]);
        assert!(matches!(
            missing.to_incidence(&inst),
            Err(InstanceError::Infeasible(_))
        ));
    }

    #[test]
    fn decodes_two_path_to_cheaper_depot() {
        // customers 0, 1; depots 2, 3. Path 2 - 0 - 3, customer 1 assigned to 0.
        let mut c = vec![vec![1.0; 4]; 4];
        c[0][2] = 4.0;
        c[2][0] = 4.0;
        c[0][3] = 1.5;
        c[3][0] = 1.5;
        let inst = Instance::from_matrices("p", 2, 2, c, vec![vec![1.0; 4]; 4]).unwrap();
        let l = inst.layout();
        let mut vals = vec![0i8; l.len()];
        vals[l.edge(0, 2).unwrap()] = 1;
        vals[l.edge(0, 3).unwrap()] = 1;
        vals[l.arc(0, 0).unwrap()] = 1;
        vals[l.arc(1, 0).unwrap()] = 1;
        vals[l.arc(2, 2).unwrap()] = 1;
        vals[l.arc(3, 3).unwrap()] = 1;
        let v = IncidenceVector::new(l, vals);
        assert_eq!(v.equality_residual(), 0);
        let sol = Solution::from_incidence(&v, Some(&inst)).unwrap();
        assert_eq!(sol.rings, vec![Ring::new(3, vec![0])]);
        assert!(sol.cost(&inst) <= v.objective(&inst));
    }

    #[test]
    fn decode_rejects_subtours_and_long_paths() {
        let inst = Instance::from_matrices("s", 4, 2, vec![vec![1.0; 6]; 6], vec![vec![1.0; 6]; 6])
            .unwrap();
        let l = inst.layout();
        let base = |vals: &mut Vec<i8>| {
            vals[l.arc(4, 4).unwrap()] = 1;
            vals[l.arc(5, 5).unwrap()] = 1;
        };
        // triangle 0-1-2 without depot, 3 assigned to depot
        let mut vals = vec![0i8; l.len()];
        base(&mut vals);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            vals[l.edge(a, b).unwrap()] = 1;
        }
        for t in 0..3 {
            vals[l.arc(t, t).unwrap()] = 1;
        }
        vals[l.arc(3, 4).unwrap()] = 1;
        let v = IncidenceVector::new(l, vals);
        assert_eq!(
            Solution::from_incidence(&v, None),
            Err(vec![Violation::Subtour])
        );
        // path 4 - 0 - 1 - 5
        let mut vals = vec![0i8; l.len()];
        base(&mut vals);
        for (a, b) in [(4, 0), (0, 1), (1, 5)] {
            vals[l.edge(a, b).unwrap()] = 1;
        }
        vals[l.arc(0, 0).unwrap()] = 1;
        vals[l.arc(1, 1).unwrap()] = 1;
        vals[l.arc(2, 0).unwrap()] = 1;
        vals[l.arc(3, 4).unwrap()] = 1;
        let v = IncidenceVector::new(l, vals);
        assert_eq!(
            Solution::from_incidence(&v, None),
            Err(vec![Violation::PathElimination])
        );
    }
}
