//! LP-guided primal heuristic: greedy assignment from `y*`, ring
//! construction over the self-assigned customers, and local search.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cuts::FractionalPoint;
use crate::instance::{IncidenceVector, Instance, Ring, Solution};

/// Minimum gain for a local-search move to be applied.
const IMPROVE_EPS: f64 = 1e-9;

/// Result of the greedy assignment: `σ` for every customer and the vertex
/// set `P` (depots plus self-assigned customers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentDraft {
    pub sigma: BTreeMap<usize, usize>,
    pub p: BTreeSet<usize>,
}

fn argmax_y(point: &FractionalPoint, i: usize, candidates: &BTreeSet<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_val = f64::NEG_INFINITY;
    for &k in candidates {
        let v = point.y(i, k);
        if v > best_val {
            best_val = v;
            best = k;
        }
    }
    best
}

/// Greedy assignment processing customers in the given order, followed by
/// a repair pass moving every target that left `P` to the best vertex of
/// the final `P`.
pub fn assign_in_order(point: &FractionalPoint, order: &[usize]) -> AssignmentDraft {
    let l = point.layout();
    let mut p: BTreeSet<usize> = (0..l.n_vertices()).collect();
    let mut sigma = BTreeMap::new();
    for &i in order {
        let k = argmax_y(point, i, &p);
        sigma.insert(i, k);
        if k != i {
            p.remove(&i);
        }
    }
    let dangling: Vec<usize> = sigma
        .iter()
        .filter(|&(&i, &k)| k != i && !p.contains(&k))
        .map(|(&i, _)| i)
        .collect();
    for i in dangling {
        let k = argmax_y(point, i, &p);
        sigma.insert(i, k);
    }
    AssignmentDraft { sigma, p }
}

/// Greedy assignment with customers drawn in random order.
pub fn greedy_assignment<R: Rng>(point: &FractionalPoint, rng: &mut R) -> AssignmentDraft {
    let mut order: Vec<usize> = point.layout().customers().collect();
    order.shuffle(rng);
    assign_in_order(point, &order)
}

fn ring_cost(inst: &Instance, depot: usize, seq: &[usize]) -> f64 {
    match seq.len() {
        0 => 0.0,
        1 => 2.0 * inst.routing_cost(depot, seq[0]),
        _ => {
            let mut c = inst.routing_cost(depot, seq[0]) + inst.routing_cost(*seq.last().unwrap(), depot);
            for w in seq.windows(2) {
                c += inst.routing_cost(w[0], w[1]);
            }
            c
        }
    }
}

/// 2-opt on a closed tour given as a vertex sequence starting at the depot.
fn two_opt(inst: &Instance, tour: &mut [usize]) -> bool {
    let n = tour.len();
    let mut improved = false;
    loop {
        let mut changed = false;
        for i in 0..n.saturating_sub(2) {
            for j in i + 2..n {
                let (a, b) = (tour[i], tour[i + 1]);
                let (c1, d) = (tour[j], tour[(j + 1) % n]);
                if d == a {
                    continue;
                }
                let delta = inst.routing_cost(a, c1) + inst.routing_cost(b, d)
                    - inst.routing_cost(a, b)
                    - inst.routing_cost(c1, d);
                if delta < -IMPROVE_EPS {
                    tour[i + 1..=j].reverse();
                    changed = true;
                }
            }
        }
        if !changed {
            return improved;
        }
        improved = true;
    }
}

fn tour_at(tour: &[usize], i: usize) -> usize {
    tour[i % tour.len()]
}

/// Moves segments of 1 to 3 customers elsewhere in the tour, possibly
/// reversed. The depot at position 0 never moves.
fn or_opt(inst: &Instance, tour: &mut Vec<usize>) -> bool {
    let mut improved = false;
    'outer: loop {
        let n = tour.len();
        for len in 1..=3usize {
            if len + 2 > n {
                break;
            }
            for start in 1..=n - len {
                let seg: Vec<usize> = tour[start..start + len].to_vec();
                let prev = tour[start - 1];
                let next = tour_at(tour, start + len);
                let removal = inst.routing_cost(prev, seg[0]) + inst.routing_cost(seg[len - 1], next)
                    - inst.routing_cost(prev, next);
                let mut rest: Vec<usize> = tour[..start].to_vec();
                rest.extend_from_slice(&tour[start + len..]);
                let m = rest.len();
                for pos in 0..m {
                    let a = rest[pos];
                    let b = rest[(pos + 1) % m];
                    if a == prev && b == next {
                        continue;
                    }
                    let fwd = inst.routing_cost(a, seg[0]) + inst.routing_cost(seg[len - 1], b);
                    let rev = inst.routing_cost(a, seg[len - 1]) + inst.routing_cost(seg[0], b);
                    let base = inst.routing_cost(a, b);
                    let (ins, reversed) = if rev < fwd { (rev, true) } else { (fwd, false) };
                    if ins - base - removal < -IMPROVE_EPS {
                        let mut s = seg.clone();
                        if reversed {
                            s.reverse();
                        }
                        let mut t = rest[..=pos].to_vec();
                        t.extend(s);
                        t.extend_from_slice(&rest[pos + 1..]);
                        *tour = t;
                        improved = true;
                        continue 'outer;
                    }
                }
            }
        }
        return improved;
    }
}

/// Improves one ring with 2-opt and Or-opt until neither applies.
pub fn improve_ring(inst: &Instance, ring: &mut Ring) {
    if ring.customers.len() < 3 {
        return;
    }
    let mut tour = vec![ring.depot];
    tour.extend_from_slice(&ring.customers);
    loop {
        let a = two_opt(inst, &mut tour);
        let b = or_opt(inst, &mut tour);
        if !a && !b {
            break;
        }
    }
    let d = tour.iter().position(|&v| v == ring.depot).unwrap();
    tour.rotate_left(d);
    ring.customers = tour[1..].to_vec();
}

/// Rings through the given customers: nearest-depot clustering, a
/// nearest-neighbour tour per depot, then local search.
pub fn build_rings(inst: &Instance, customers: &[usize]) -> Vec<Ring> {
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &t in customers {
        let d = inst
            .depots()
            .min_by(|&a, &b| inst.routing_cost(a, t).total_cmp(&inst.routing_cost(b, t)).then(a.cmp(&b)))
            .expect("at least one depot");
        clusters.entry(d).or_default().push(t);
    }
    let mut rings = Vec::new();
    for (depot, mut left) in clusters {
        let mut seq = Vec::with_capacity(left.len());
        let mut cur = depot;
        while !left.is_empty() {
            let (idx, _) = left
                .iter()
                .enumerate()
                .min_by(|a, b| inst.routing_cost(cur, *a.1).total_cmp(&inst.routing_cost(cur, *b.1)).then(a.1.cmp(b.1)))
                .unwrap();
            cur = left.swap_remove(idx);
            seq.push(cur);
        }
        let mut ring = Ring::new(depot, seq);
        improve_ring(inst, &mut ring);
        rings.push(ring);
    }
    rings
}

/// LP-guided construction: greedy assignment, rings over the
/// self-assigned customers, stars to the assigned targets. An integral
/// point that decodes to a feasible solution is returned as is.
pub fn lp_heuristic<R: Rng>(inst: &Instance, point: &FractionalPoint, rng: &mut R) -> Solution {
    if point.is_integral(1e-6) {
        let values = point.values().iter().map(|v| v.round() as i8).collect();
        let v = IncidenceVector::new(point.layout(), values);
        if let Ok(sol) = Solution::from_incidence(&v, Some(inst)) {
            return sol;
        }
    }
    let draft = greedy_assignment(point, rng);
    let on_ring: Vec<usize> = draft.sigma.iter().filter(|&(&i, &k)| i == k).map(|(&i, _)| i).collect();
    let rings = build_rings(inst, &on_ring);
    let assignments = draft.sigma.into_iter().filter(|&(i, k)| i != k).collect();
    Solution { rings, assignments }
}

struct Work<'a> {
    inst: &'a Instance,
    rings: Vec<Ring>,
    on_ring: Vec<bool>,
    assign: BTreeMap<usize, usize>,
}

impl Work<'_> {
    fn best_target(&self, i: usize) -> (usize, f64) {
        let inst = self.inst;
        inst.depots()
            .chain(inst.customers().filter(|&c| self.on_ring[c] && c != i))
            .map(|k| (k, inst.assignment_cost(i, k)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap()
    }

    fn retarget_all(&mut self) {
        let stars: Vec<usize> = self.assign.keys().copied().collect();
        for i in stars {
            let (k, _) = self.best_target(i);
            self.assign.insert(i, k);
        }
    }

    /// Takes a ring customer off its ring if that lowers the cost.
    fn try_remove(&mut self, t: usize) -> bool {
        let inst = self.inst;
        let (ri, pos) = self
            .rings
            .iter()
            .enumerate()
            .find_map(|(ri, r)| r.customers.iter().position(|&c| c == t).map(|p| (ri, p)))
            .unwrap();
        let ring = &self.rings[ri];
        let mut shorter = ring.customers.clone();
        shorter.remove(pos);
        let mut delta = ring_cost(inst, ring.depot, &shorter) - ring_cost(inst, ring.depot, &ring.customers)
            - inst.assignment_cost(t, t);
        self.on_ring[t] = false;
        let (target, c) = self.best_target(t);
        delta += c;
        let orphans: Vec<usize> = self.assign.iter().filter(|&(_, &k)| k == t).map(|(&i, _)| i).collect();
        let mut moves = Vec::new();
        for &i in &orphans {
            let (k, c) = self.best_target(i);
            delta += c - inst.assignment_cost(i, t);
            moves.push((i, k));
        }
        if delta < -IMPROVE_EPS {
            self.rings[ri].customers = shorter;
            self.rings.retain(|r| !r.customers.is_empty());
            self.assign.insert(t, target);
            for (i, k) in moves {
                self.assign.insert(i, k);
            }
            true
        } else {
            self.on_ring[t] = true;
            false
        }
    }

    /// Puts a star customer on the cheapest ring position (or a new
    /// degenerate ring) if that lowers the cost.
    fn try_insert(&mut self, t: usize) -> bool {
        let inst = self.inst;
        let current = inst.assignment_cost(t, self.assign[&t]);
        let mut gain = 0.0;
        for (&i, &k) in &self.assign {
            if i != t {
                gain += (inst.assignment_cost(i, t) - inst.assignment_cost(i, k)).min(0.0);
            }
        }
        // (ring index or NONE for a new ring, depot, position, delta)
        let mut best: Option<(usize, usize, usize, f64)> = None;
        for d in inst.depots() {
            let delta = 2.0 * inst.routing_cost(d, t);
            if best.is_none_or(|b| delta < b.3) {
                best = Some((usize::MAX, d, 0, delta));
            }
        }
        for (ri, r) in self.rings.iter().enumerate() {
            let old = ring_cost(inst, r.depot, &r.customers);
            for pos in 0..=r.customers.len() {
                let delta = if r.customers.len() >= 2 {
                    let a = if pos == 0 { r.depot } else { r.customers[pos - 1] };
                    let b = if pos == r.customers.len() { r.depot } else { r.customers[pos] };
                    inst.routing_cost(a, t) + inst.routing_cost(t, b) - inst.routing_cost(a, b)
                } else {
                    let mut s = r.customers.clone();
                    s.insert(pos, t);
                    ring_cost(inst, r.depot, &s) - old
                };
                if best.is_none_or(|b| delta < b.3) {
                    best = Some((ri, r.depot, pos, delta));
                }
            }
        }
        let (ri, depot, pos, delta) = best.unwrap();
        let total = delta + inst.assignment_cost(t, t) - current + gain;
        if total >= -IMPROVE_EPS {
            return false;
        }
        if ri == usize::MAX {
            self.rings.push(Ring::new(depot, vec![t]));
        } else {
            self.rings[ri].customers.insert(pos, t);
        }
        self.assign.remove(&t);
        self.on_ring[t] = true;
        self.retarget_all();
        true
    }
}

/// Local search over ring membership: customers move between ring and star
/// while that pays off, stars are retargeted, rings re-optimized. Never
/// increases the cost of a feasible input.
pub fn improve(inst: &Instance, sol: &Solution) -> Solution {
    let mut on_ring = vec![false; inst.n_vertices()];
    for r in &sol.rings {
        for &c in &r.customers {
            on_ring[c] = true;
        }
    }
    let mut w = Work {
        inst,
        rings: sol.rings.iter().filter(|r| !r.customers.is_empty()).cloned().collect(),
        on_ring,
        assign: sol.assignments.clone(),
    };
    w.retarget_all();
    for _ in 0..100 {
        let mut changed = false;
        for t in inst.customers() {
            changed |= if w.on_ring[t] { w.try_remove(t) } else { w.try_insert(t) };
        }
        for r in &mut w.rings {
            improve_ring(inst, r);
        }
        if !changed {
            break;
        }
    }
    let mut out = Solution {
        rings: w.rings,
        assignments: w.assign,
    };
    out.normalize();
    if out.cost(inst) <= sol.cost(inst) + IMPROVE_EPS || !sol.is_feasible(inst) {
        out
    } else {
        sol.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_cost_degenerate() {
        let inst = Instance::from_matrices(
            "d",
            1,
            1,
            vec![vec![0.0, 5.0], vec![5.0, 0.0]],
            vec![vec![0.0, 20.0], vec![20.0, 0.0]],
        )
        .unwrap();
        assert_eq!(ring_cost(&inst, 1, &[0]), 10.0);
        assert_eq!(ring_cost(&inst, 1, &[]), 0.0);
    }
}
