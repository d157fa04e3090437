mod common;

use meshstream::meshcore::descriptor::{DescriptorConfig, DescriptorStream, Precision};
use meshstream::meshcore::{classical_bandwidth, serial_bandwidth, BoundaryKind, Graph};
use meshstream::Labeling;
use proptest::prelude::*;

use common::*;

/// Renames vertex v to p(v) and carries the labeling along, so the labeled
/// structure is unchanged.
fn rename(g: &Graph, f: &Labeling, p: &Labeling) -> (Graph, Labeling) {
    let edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (p.label(u) - 1, p.label(v) - 1)).collect();
    let h = Graph::from_edges(g.n(), &edges).unwrap();
    let mut labels = vec![0; g.n()];
    for v in 0..g.n() {
        labels[p.label(v) - 1] = f.label(v);
    }
    (h, Labeling::new(labels).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serial_bandwidth_dominates_classical((g, f) in labeled(12)) {
        let s = serial_bandwidth(&g, &f).unwrap();
        let b = classical_bandwidth(&g, &f).unwrap();
        prop_assert!(s >= b);
        prop_assert_eq!(s, literal_sbw(&g, &f));
        prop_assert_eq!(b, literal_bw(&g, &f));
    }

    #[test]
    fn metrics_survive_reversal_and_renaming((g, f) in labeled(12), seed in any::<u64>()) {
        let (s, b) = (serial_bandwidth(&g, &f).unwrap(), classical_bandwidth(&g, &f).unwrap());
        let r = f.reversed();
        prop_assert_eq!(serial_bandwidth(&g, &r).unwrap(), s);
        prop_assert_eq!(classical_bandwidth(&g, &r).unwrap(), b);
        let p = permutation(g.n(), seed);
        let (h, fh) = rename(&g, &r, &p);
        prop_assert_eq!(serial_bandwidth(&h, &fh).unwrap(), s);
        prop_assert_eq!(classical_bandwidth(&h, &fh).unwrap(), b);
    }

    #[test]
    fn dual_graph_degree_at_most_three(nx in 1usize..9, ny in 1usize..9, seed in any::<u64>()) {
        let mesh = jittered_mesh(nx, ny, seed, BoundaryKind::Wall);
        let g = mesh.dual_graph();
        prop_assert_eq!(g.n(), 2 * nx * ny);
        prop_assert!(g.max_degree() <= 3);
        for t in 0..mesh.num_triangles() {
            prop_assert!(mesh.area(t) > 0.0);
        }
    }

    #[test]
    fn descriptor_round_trip(nx in 1usize..6, ny in 1usize..6, seed in any::<u64>(), width in 8u8..=32, depth in proptest::option::of(8usize..64)) {
        let mesh = jittered_mesh(nx, ny, seed, BoundaryKind::Wall);
        let n = mesh.num_triangles();
        let f = permutation(n, seed ^ 0x5eed);
        let values: Vec<f64> = (0..n * 7).map(|i| (i as f64).sin()).collect();
        let cfg = DescriptorConfig { index_width: width, precision: Precision::Double, values_per_node: 7, memory_depth: depth };
        let s = DescriptorStream::from_mesh(&mesh, &f, &values, cfg).unwrap();
        let bytes = s.encode();
        let back = DescriptorStream::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.encode(), bytes);
        prop_assert_eq!(s.connectivity.iter().filter(|c| c.row_start).count(), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn brute_force_lower_bounds_heuristics(g in any_graph(7), seed in any::<u64>()) {
        let best = brute_force_min_sbw(&g);
        let gps = meshstream::reorder::gps_reorder(&g).unwrap();
        let am1 = meshstream::reorder::am1_reorder(&g, seed).unwrap();
        prop_assert!(serial_bandwidth(&g, &gps).unwrap() >= best);
        prop_assert!(serial_bandwidth(&g, &am1).unwrap() >= best);
        prop_assert_eq!(meshstream::reorder::exact_min_sbw(&g).unwrap().1, best);
    }
}
