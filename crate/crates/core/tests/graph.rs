use mdrsp::graph::CapGraph;
use proptest::prelude::*;

/// Minimum over every partition with `s` on one side and `t` on the other.
fn brute_min_cut(g: &CapGraph, s: usize, t: usize) -> f64 {
    let n = g.n_vertices();
    let free: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..1 << free.len() {
        let mut side = vec![false; n];
        side[s] = true;
        for (b, &v) in free.iter().enumerate() {
            side[v] = mask >> b & 1 == 1;
        }
        best = best.min(g.cut_capacity(&side));
    }
    best
}

#[test]
fn spec_examples() {
    let mut g = CapGraph::new(3);
    g.add_edge(0, 1, 1.0);
    assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2]]);
    assert_eq!(CapGraph::new(3).connected_components().len(), 3);

    // s=0, a=1, t=2
    let mut g = CapGraph::new(2);
    g.add_edge(0, 1, 3.0);
    let c = g.min_st_cut(0, 1);
    assert_eq!((c.value, c.source_vertices()), (3.0, vec![0]));

    let mut g = CapGraph::new(3);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 2, 2.0);
    let c = g.min_st_cut(0, 2);
    assert_eq!((c.value, c.source_vertices()), (1.0, vec![0]));
    g.add_edge(0, 2, 1.0);
    let c = g.min_st_cut(0, 2);
    assert_eq!((c.value, c.source_vertices()), (2.0, vec![0]));
}

fn graphs() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..=10).prop_flat_map(|n| {
        let edge = (0..n, 0..n, prop_oneof![Just(0.0), 0.0..3.0f64, (0u8..=4).prop_map(f64::from)]);
        (Just(n), prop::collection::vec(edge, 0..=3 * n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn min_cut_matches_enumeration((n, edges) in graphs(), s in 0usize..10, t in 0usize..10) {
        let (s, t) = (s % n, t % n);
        prop_assume!(s != t);
        let mut g = CapGraph::new(n);
        for &(a, b, c) in &edges {
            g.add_edge(a, b, c);
        }
        let cut = g.min_st_cut(s, t);
        prop_assert!(cut.source_side[s] && !cut.source_side[t]);
        prop_assert!((cut.value - g.cut_capacity(&cut.source_side)).abs() <= 1e-9);
        prop_assert!((cut.value - cut.flow).abs() <= 1e-9);
        prop_assert!((cut.value - brute_min_cut(&g, s, t)).abs() <= 1e-9);
    }

    #[test]
    fn components_partition_the_vertices((n, edges) in graphs()) {
        let mut g = CapGraph::new(n);
        for &(a, b, c) in &edges {
            g.add_edge(a, b, c);
        }
        let comps = g.connected_components();
        let mut all: Vec<usize> = comps.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let labels = g.component_labels();
        for &(a, b, c) in g.edges() {
            if c > 0.0 {
                prop_assert_eq!(labels[a], labels[b]);
            }
        }
    }
}
