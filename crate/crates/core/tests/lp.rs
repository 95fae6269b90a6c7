mod common;

use mdrsp::instance::Layout;
use mdrsp::lp::{build_root_lp, solve, Limits, LpModel, Row, Sense, Side, Simplex, Status};
use proptest::prelude::*;

fn model(obj: &[f64], upper: &[f64], rows: &[(Vec<f64>, Sense, f64)]) -> LpModel {
    let mut m = LpModel::new();
    for (&c, &u) in obj.iter().zip(upper) {
        m.add_column(c, 0.0, u);
    }
    for (coefs, sense, rhs) in rows {
        let coefs = coefs.iter().copied().enumerate().collect();
        m.add_row(Row::new(coefs, *sense, *rhs)).unwrap();
    }
    m
}

/// Solves `a x = b` for a square system; `None` when singular.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all basic feasible points: every choice of `n` tight
/// hyperplanes among rows and bounds. `None` when no vertex is feasible.
fn vertex_oracle(obj: &[f64], upper: &[f64], rows: &[(Vec<f64>, f64)]) -> Option<f64> {
    let n = obj.len();
    let mut planes: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, upper[j]));
    }
    let feasible = |x: &[f64]| {
        x.iter().zip(upper).all(|(&v, &u)| v >= -1e-9 && v <= u + 1e-9)
            && rows
                .iter()
                .all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9)
    };
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut pick = vec![0usize; n];
    fn rec(
        depth: usize,
        start: usize,
        k: usize,
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for i in start..k {
            pick[depth] = i;
            rec(depth + 1, i + 1, k, pick, visit);
        }
    }
    rec(0, 0, k, &mut pick, &mut |idx| {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = gauss(a, b) {
            if feasible(&x) {
                let z: f64 = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(z, |b: f64| b.min(z)));
            }
        }
    });
    best
}

#[test]
fn spec_examples() {
    let m = model(&[1.0], &[10.0], &[(vec![1.0], Sense::Ge, 1.0)]);
    let s = solve(&m, None);
    assert_eq!(s.status, Status::Optimal);
    assert!((s.objective - 1.0).abs() < 1e-9 && (s.primal[0] - 1.0).abs() < 1e-9);

    let m = model(
        &[0.0],
        &[10.0],
        &[(vec![1.0], Sense::Ge, 1.0), (vec![1.0], Sense::Le, 0.0)],
    );
    assert_eq!(solve(&m, None).status, Status::Infeasible);

    let m = model(&[-1.0, -1.0], &[1.0, 1.0], &[(vec![1.0, 1.0], Sense::Le, 1.0)]);
    let s = solve(&m, None);
    assert_eq!(s.status, Status::Optimal);
    assert!((s.objective + 1.0).abs() < 1e-9);
    let oracle = vertex_oracle(&[-1.0, -1.0], &[1.0, 1.0], &[(vec![1.0, 1.0], 1.0)]).unwrap();
    assert!((oracle + 1.0).abs() < 1e-12);

    let mut spx = Simplex::new(model(&[1.0], &[5.0], &[]));
    spx.set_bound(0, Side::Lower, 3.0).unwrap();
    spx.set_bound(0, Side::Upper, 2.0).unwrap();
    assert_eq!(spx.solve(&Limits::default()), Status::Infeasible);
}

#[test]
fn root_lp_sizes() {
    let m = build_root_lp(&common::random_cost_instance(4, 2, 1));
    assert_eq!(m.n_columns(), 48);
    assert_eq!(m.rows().iter().filter(|r| r.sense == Sense::Eq).count(), 8);
    assert_eq!(m.rows().iter().filter(|r| r.sense == Sense::Le).count(), 8);
    assert_eq!(Layout::new(29, 3).len(), 1511);
}

#[test]
fn cuts_and_branching_only_raise_the_objective() {
    let inst = common::random_cost_instance(6, 2, 3);
    let l = inst.layout();
    let mut spx = Simplex::new(build_root_lp(&inst));
    assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
    let mut last = spx.objective();
    for _ in 0..8 {
        let p = mdrsp::FractionalPoint::new(l, spx.primal().to_vec());
        let cuts = mdrsp::cuts::sep_sec(&p);
        if cuts.is_empty() {
            break;
        }
        spx.add_rows(cuts.into_iter().map(|c| c.row).collect()).unwrap();
        assert_eq!(spx.solve(&Limits::default()), Status::Optimal);
        assert!(spx.objective() >= last - 1e-9);
        assert!(spx.model().max_violation(spx.primal()) <= 1e-6);
        last = spx.objective();
    }
    let y = l.arc(2, 2).unwrap();
    spx.set_bound(y, Side::Upper, 0.0).unwrap();
    if spx.solve(&Limits::default()) == Status::Optimal {
        assert!(spx.objective() >= last - 1e-9);
    }
}

#[test]
fn warm_and_cold_solves_agree() {
    let inst = common::random_cost_instance(5, 2, 9);
    let m = build_root_lp(&inst);
    let cold = solve(&m, None);
    let warm = solve(&m, Some(&cold.basis));
    assert!((cold.objective - warm.objective).abs() < 1e-9);
    assert_eq!(warm.iterations, 0);
    let again = solve(&m, None);
    assert_eq!(cold.objective, again.objective);
}

fn coef() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(f64::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_vertex_enumeration(
        n in 1usize..=3,
        obj in prop::collection::vec(coef(), 3),
        upper in prop::collection::vec(1i32..=5, 3),
        rows in prop::collection::vec((prop::collection::vec(coef(), 3), -3i32..=8), 0..=3),
    ) {
        let obj = &obj[..n];
        let upper: Vec<f64> = upper[..n].iter().map(|&u| u as f64).collect();
        let rows: Vec<(Vec<f64>, f64)> =
            rows.into_iter().map(|(a, b)| (a[..n].to_vec(), b as f64)).collect();
        let lp_rows: Vec<_> = rows.iter().map(|(a, b)| (a.clone(), Sense::Le, *b)).collect();
        let s = solve(&model(obj, &upper, &lp_rows), None);
        match vertex_oracle(obj, &upper, &rows) {
            None => prop_assert_eq!(s.status, Status::Infeasible),
            Some(z) => {
                prop_assert_eq!(s.status, Status::Optimal);
                prop_assert!((s.objective - z).abs() < 1e-7, "lp {} oracle {}", s.objective, z);
                let m = model(obj, &upper, &lp_rows);
                prop_assert!(m.max_violation(&s.primal) <= 1e-6);
            }
        }
    }
}
