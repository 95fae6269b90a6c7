use mdrsp::instance::{
    generate_instance, parse_tsplib, ClassTag, CostModel, Instance, Layout, Ring, Solution, SolutionFile,
};
use proptest::prelude::*;

#[test]
fn tsplib_examples() {
    let euc = "NAME: two\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 4\nEOF\n";
    assert_eq!(parse_tsplib(euc).unwrap().base_distance(0, 1), 5.0);
    let full = "NAME: m\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 7\n7 0\nEOF\n";
    assert_eq!(parse_tsplib(full).unwrap().base_distance(1, 0), 7.0);
    let geo = euc.replace("EUC_2D", "GEO");
    let err = parse_tsplib(&geo).unwrap_err().to_string();
    assert!(err.contains("unsupported weight type"), "{err}");
}

#[test]
fn class_two_costs() {
    let base = CostModel::random_points(5, 100.0, 1);
    let one = generate_instance(&base, 2, ClassTag::I, None, 4).unwrap();
    let two = generate_instance(&base, 2, ClassTag::II, Some(3), 4).unwrap();
    for i in 0..7 {
        for j in 0..7 {
            if i < 5 && i != j {
                assert!((two.assignment_cost(i, j) - 7.0 * one.assignment_cost(i, j)).abs() < 1e-9);
            }
            assert!((two.routing_cost(i, j) - 3.0 * one.routing_cost(i, j)).abs() < 1e-9);
        }
    }
    assert!(generate_instance(&base, 2, ClassTag::II, None, 4).is_err());
    assert!(generate_instance(&base, 2, ClassTag::II, Some(4), 4).is_err());
}

#[test]
fn solution_costs() {
    let inst = Instance::from_matrices(
        "one",
        1,
        1,
        vec![vec![0.0, 5.0], vec![5.0, 0.0]],
        vec![vec![0.0, 20.0], vec![20.0, 0.0]],
    )
    .unwrap();
    let ring = Solution {
        rings: vec![Ring::new(1, vec![0])],
        ..Solution::default()
    };
    assert_eq!(ring.cost(&inst), 10.0);
    assert_eq!(ring.to_incidence(&inst).unwrap().len(), Layout::new(1, 1).len());
    assert_eq!(Solution::all_to_nearest_depot(&inst).cost(&inst), 20.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_instances_round_trip(
        u in 1usize..15,
        n in 1usize..4,
        alpha in prop::option::of(prop::sample::select(vec![3u32, 5, 7, 9])),
        seed in 0u64..10_000,
    ) {
        let base = CostModel::random_points(u, 500.0, seed);
        let class = if alpha.is_some() { ClassTag::II } else { ClassTag::I };
        let a = generate_instance(&base, n, class, alpha, seed).unwrap();
        let b = generate_instance(&base, n, class, alpha, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let text = a.to_json();
        prop_assert_eq!(&text, &b.to_json());
        prop_assert_eq!(&Instance::from_json(&text).unwrap(), &a);
        let reparsed = parse_tsplib(&base.to_tsplib()).unwrap();
        for i in 0..u {
            for j in 0..u {
                prop_assert!((reparsed.base_distance(i, j) - base.base_distance(i, j)).abs() < 1e-9);
            }
        }
        let star = Solution::all_to_nearest_depot(&a);
        prop_assert!(star.is_feasible(&a));
        let file = SolutionFile::new(&a, &star);
        let back = SolutionFile::from_json(&file.to_json()).unwrap().solution();
        prop_assert_eq!(back, star.clone());
        let v = star.to_incidence(&a).unwrap();
        prop_assert_eq!(v.equality_residual(), 0);
        prop_assert!((v.objective(&a) - star.cost(&a)).abs() < 1e-6);
    }
}
