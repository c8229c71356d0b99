use std::collections::BTreeSet;

use proptest::prelude::*;

use planetrack::generate::{grid, random_triangulation, wheel};
use planetrack::layering::reform;
use planetrack::plane_graph::{edge_key, triangulate, PlaneGraph};

fn assert_triangulated(original: &PlaneGraph, t: &PlaneGraph) {
    let n = t.vertex_count();
    // Inner faces become triangles; the outer face keeps its length k, so
    // Euler gives 3n - 3 - k edges.
    let k = t.outer_face().len();
    assert_eq!(original.outer_face(), t.outer_face());
    assert_eq!(t.edge_count(), 3 * n - 3 - k);
    let keys: BTreeSet<_> = t.edges().iter().map(|&(u, v)| edge_key(u, v)).collect();
    assert_eq!(keys.len(), t.edge_count(), "parallel edges");
    assert!(t.edges().iter().all(|&(u, v)| u != v));
    assert!(original.edge_set().is_subset(&t.edge_set()));
    let outer = t.traced_outer_face().unwrap();
    assert!(t.faces().iter().filter(|f| **f != outer).all(|f| f.len() == 3));
    assert!(t.is_connected());
    assert!(t.validate_embedding().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn contraction_restores_input(n in 3usize..=50, seed in any::<u64>()) {
        let g = random_triangulation(n, seed).unwrap();
        let r = reform(&g).unwrap();
        prop_assert_eq!(r.map.contract(&r.graph), g.edge_set());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn grids_triangulate(rows in 2usize..8, cols in 2usize..8) {
        let g = grid(rows, cols).unwrap();
        let (t, map) = triangulate(&g).unwrap();
        assert_triangulated(&g, &t);
        prop_assert_eq!(map.contract(&t), g.edge_set());
        let r = reform(&t).unwrap();
        prop_assert_eq!(map.then(r.map.clone()).contract(&r.graph), g.edge_set());
    }

    #[test]
    fn wheels_triangulate(n in 4usize..40) {
        let g = wheel(n).unwrap();
        let (t, _) = triangulate(&g).unwrap();
        assert_triangulated(&g, &t);
    }
}
