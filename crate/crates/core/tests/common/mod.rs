//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use mdrsp::cuts::{separate, Family, FractionalPoint};
use mdrsp::instance::{Instance, Layout};
use mdrsp::lp::{build_root_lp, Limits, Simplex, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Instance with independent random routing and assignment costs, so every
/// seed gives a differently shaped LP objective.
pub fn random_cost_instance(u: usize, n: usize, seed: u64) -> Instance {
    let nv = u + n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![vec![0.0; nv]; nv];
    let mut d = vec![vec![0.0; nv]; nv];
    for i in 0..nv {
        for j in i + 1..nv {
            let v = rng.gen_range(1.0..100.0f64).round();
            c[i][j] = v;
            c[j][i] = v;
        }
        for j in 0..nv {
            if i != j {
                d[i][j] = rng.gen_range(1.0..150.0f64).round();
            }
        }
    }
    Instance::from_matrices(format!("rand-{u}-{n}-{seed}"), u, n, c, d).unwrap()
}

/// LP points met while cutting on the root relaxation of `inst`: the first
/// solve, then one point after every round of cuts, up to `rounds` rounds.
pub fn cutting_points(inst: &Instance, rounds: usize) -> Vec<FractionalPoint> {
    let l = inst.layout();
    let mut spx = Simplex::new(build_root_lp(inst));
    let mut out = Vec::new();
    for _ in 0..=rounds {
        if spx.solve(&Limits::default()) != Status::Optimal {
            break;
        }
        let p = FractionalPoint::new(l, spx.primal().to_vec());
        out.push(p.clone());
        let rows: Vec<_> = [Family::Pair, Family::Sec, Family::Pec2, Family::Pec, Family::TwoMatch]
            .into_iter()
            .map(|f| separate(&p, f))
            .find(|c| !c.is_empty())
            .unwrap_or_default()
            .into_iter()
            .map(|c| c.row)
            .collect();
        if rows.is_empty() {
            break;
        }
        spx.add_rows(rows).unwrap();
    }
    out
}

/// Point with the given `(column, value)` entries and zeros elsewhere.
/// Depot self-arcs are set to one.
pub fn point(l: Layout, entries: &[(usize, f64)]) -> FractionalPoint {
    let mut v = vec![0.0; l.len()];
    for d in l.depots() {
        v[l.arc(d, d).unwrap()] = 1.0;
    }
    for &(c, x) in entries {
        v[c] = x;
    }
    FractionalPoint::new(l, v)
}

/// For every customer `i`, the minimum over `S ∋ i`, `S ⊆ T`, of
/// `x(δ(S)) + 2Σ_{j∉S} y_ij`, by enumeration.
pub fn sec_brute(p: &FractionalPoint) -> Vec<f64> {
    let l = p.layout();
    let u = l.n_customers();
    l.customers()
        .map(|i| {
            let mut best = f64::INFINITY;
            for mask in 0u32..1 << u {
                if mask >> i & 1 == 0 {
                    continue;
                }
                let inside = |v: usize| l.is_customer(v) && mask >> v & 1 == 1;
                let mut val = 0.0;
                for a in l.customers().filter(|&a| inside(a)) {
                    for (b, c) in l.incident_edges(a) {
                        if !inside(b) {
                            val += p.values()[c];
                        }
                    }
                }
                for j in 0..l.n_vertices() {
                    if !inside(j) {
                        val += 2.0 * p.y(i, j);
                    }
                }
                best = best.min(val);
            }
            best
        })
        .collect()
}
