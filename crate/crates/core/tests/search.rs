mod common;

use std::collections::HashSet;

use common::point;
use mdrsp::cuts::{sep_pairs, sep_sec, Family, Witness};
use mdrsp::instance::{generate_instance, ClassTag, CostModel, Instance, Layout};
use mdrsp::lp::{build_root_lp, Limits, LpModel, Simplex};
use mdrsp::polylab::{brute_force_opt, oracle_instance};
use mdrsp::search::{branch_candidates, next_node, select_branch_var, separation_round, Node, OpenSet};
use mdrsp::{branch_and_cut, Params, Report, Termination};

fn single(c: f64, d: f64) -> Instance {
    Instance::from_matrices(
        "single",
        1,
        1,
        vec![vec![0.0, c], vec![c, 0.0]],
        vec![vec![0.0, d], vec![d, 0.0]],
    )
    .unwrap()
}

fn check_report(inst: &Instance, rep: &Report) {
    assert!(rep.lb <= rep.ub + 1e-6);
    assert!(rep.root_lb <= rep.ub + 1e-6);
    let sol = rep.incumbent.as_ref().expect("an incumbent always exists");
    assert!(sol.check_feasible(inst).is_empty());
    assert!((sol.cost(inst) - rep.ub).abs() <= 1e-9 * rep.ub.abs().max(1.0));
    if rep.termination == Termination::Optimal {
        assert!(rep.gap() <= 1e-6);
    }
}

#[test]
fn single_customer() {
    let rep = branch_and_cut(&single(5.0, 20.0), &Params::default()).unwrap();
    assert_eq!(rep.termination, Termination::Optimal);
    assert!((rep.ub - 10.0).abs() < 1e-9);
    let rep = branch_and_cut(&single(5.0, 3.0), &Params::default()).unwrap();
    assert!((rep.ub - 3.0).abs() < 1e-9);
}

#[test]
fn best_first_order() {
    let mut open = OpenSet::new();
    for (id, b) in [(1, 10.2), (2, 9.8), (3, 11.0)] {
        open.push(Node::new(id, b));
    }
    assert_eq!(next_node(&mut open).unwrap().id, 2);

    let mut open = OpenSet::new();
    open.push(Node::new(7, 9.8));
    open.push(Node::new(4, 9.8));
    assert_eq!(next_node(&mut open).unwrap().id, 4);

    let mut open = OpenSet::new();
    open.push(Node::new(5, 1.0));
    assert_eq!(next_node(&mut open).unwrap().id, 5);
    assert!(next_node(&mut open).is_none());
}

#[test]
fn branching_prefers_open_customers() {
    let l = Layout::new(4, 2);
    let (y, x) = (l.arc(3, 3).unwrap(), l.edge(0, 1).unwrap());
    let p = point(l, &[(y, 0.5), (x, 0.5)]);
    assert_eq!(branch_candidates(&p), vec![y]);
    let p = point(l, &[(x, 0.5), (l.arc(0, 1).unwrap(), 0.5)]);
    assert_eq!(branch_candidates(&p), vec![x]);
    let all_integral = point(l, &[(x, 1.0)]);
    assert!(branch_candidates(&all_integral).is_empty());
}

/// A model whose objective ignores every column, so all scores tie.
fn flat_simplex(l: Layout) -> Simplex {
    let mut m = LpModel::new();
    for _ in 0..l.len() {
        m.add_column(0.0, 0.0, 2.0);
    }
    let mut spx = Simplex::new(m);
    spx.solve(&Limits::default());
    spx
}

#[test]
fn depot_edges_split_on_integer_bounds() {
    let l = Layout::new(4, 2);
    let x = l.edge(1, 4).unwrap();
    let b = select_branch_var(&flat_simplex(l), &point(l, &[(x, 1.5)]), &Params::default(), None).unwrap();
    assert_eq!((b.column, b.down_upper, b.up_lower), (x, 1.0, 2.0));

    let (a, c) = (l.arc(1, 1).unwrap(), l.arc(3, 3).unwrap());
    let p = point(l, &[(a, 0.5), (c, 0.5)]);
    let b = select_branch_var(&flat_simplex(l), &p, &Params::default(), None).unwrap();
    assert_eq!(b.column, a.min(c));

    let err = select_branch_var(&flat_simplex(l), &point(l, &[]), &Params::default(), None);
    assert!(err.is_err());
}

#[test]
fn earlier_families_win_the_round() {
    let l = Layout::new(4, 1);
    // a fractional pair inside a depot-free triangle
    let mut e: Vec<_> = [(0, 1), (1, 2), (0, 2)].iter().map(|&(a, b)| (l.edge(a, b).unwrap(), 1.0)).collect();
    e.extend((0..3).map(|t| (l.arc(t, t).unwrap(), 0.5)));
    let p = point(l, &e);
    assert!(!sep_pairs(&p).is_empty() && !sep_sec(&p).is_empty());
    let round = separation_round(&p, &Params::default(), false, &HashSet::new());
    assert!(!round.is_empty());
    assert!(round.iter().all(|c| c.family() == Family::Pair));

    let pool: HashSet<Witness> = sep_pairs(&p).into_iter().map(|c| c.witness).collect();
    let round = separation_round(&p, &Params::default(), false, &pool);
    assert!(round.iter().all(|c| c.family() == Family::Sec));

    let off = Params {
        pair: false,
        sec: false,
        pec: false,
        two_matching: false,
        ..Params::default()
    };
    assert!(separation_round(&p, &off, false, &HashSet::new()).is_empty());
    assert!(!separation_round(&p, &off, true, &HashSet::new()).is_empty());
}

#[test]
fn matches_brute_force_on_small_instances() {
    for index in [0, 3, 6, 9, 12, 17] {
        let inst = oracle_instance(index);
        let opt = brute_force_opt(&inst).unwrap().cost(&inst);
        let rep = branch_and_cut(&inst, &Params::default()).unwrap();
        check_report(&inst, &rep);
        assert_eq!(rep.termination, Termination::Optimal);
        assert!((rep.ub - opt).abs() <= 1e-6 * opt.abs().max(1.0), "{index}: {} vs {opt}", rep.ub);
    }
    for seed in 0..4 {
        let inst = common::random_cost_instance(6, 2, 500 + seed);
        let opt = brute_force_opt(&inst).unwrap().cost(&inst);
        let rep = branch_and_cut(&inst, &Params::default()).unwrap();
        check_report(&inst, &rep);
        assert!((rep.ub - opt).abs() <= 1e-6 * opt.abs().max(1.0));
    }
}

#[test]
fn time_limit_keeps_valid_bounds() {
    let base = CostModel::random_points(40, 1000.0, 3);
    let inst = generate_instance(&base, 3, ClassTag::I, None, 3).unwrap();
    let params = Params {
        time_limit: 0.01,
        ..Params::default()
    };
    let rep = branch_and_cut(&inst, &params).unwrap();
    assert_eq!(rep.termination, Termination::TimeLimit);
    check_report(&inst, &rep);
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let inst = oracle_instance(13);
    let a = branch_and_cut(&inst, &Params::default()).unwrap();
    let b = branch_and_cut(&inst, &Params::default()).unwrap();
    assert_eq!(a.incumbent, b.incumbent);
    assert_eq!((a.ub, a.lb, a.root_lb), (b.ub, b.lb, b.root_lb));
    let strip = |r: &Report| {
        let mut s = r.stats.clone();
        s.time_seconds = 0.0;
        s
    };
    assert_eq!(strip(&a), strip(&b));
    let back = Report::from_json(&a.to_json()).unwrap();
    assert_eq!(back.incumbent, a.incumbent);
    assert_eq!(back.stats, a.stats);
    assert_eq!(back.termination, a.termination);
}

#[test]
fn root_bound_grows_with_families() {
    let root_only = Params {
        node_limit: Some(0),
        ..Params::default()
    };
    let weak = Params {
        sec: false,
        pec: false,
        two_matching: false,
        ..root_only.clone()
    };
    let mut strict = 0;
    for seed in 0..4 {
        let base = CostModel::random_points(12, 1000.0, 70 + seed);
        let inst = generate_instance(&base, 2, ClassTag::I, None, seed).unwrap();
        let full = branch_and_cut(&inst, &root_only).unwrap();
        let less = branch_and_cut(&inst, &weak).unwrap();
        let lp = mdrsp::lp::solve(&build_root_lp(&inst), None).objective;
        assert!(less.root_lb >= lp - 1e-6);
        assert!(full.root_lb >= less.root_lb - 1e-6);
        if full.root_lb > less.root_lb + 1e-6 {
            strict += 1;
        }
    }
    assert!(strict >= 1);
}
