mod common;

use meshstream::meshcore::{serial_bandwidth, Graph};
use meshstream::reorder::{am1_reorder, am1_reorder_logged, am1_reorder_with, exact_with, gps_reorder, Am1Mode};
use meshstream::Labeling;
use proptest::prelude::*;

use common::*;

fn is_bijection(f: &Labeling, n: usize) -> bool {
    let mut seen = vec![false; n];
    f.len() == n
        && f.labels().iter().all(|&l| (1..=n).contains(&l) && !std::mem::replace(&mut seen[l - 1], true))
}

/// Every vertex after the first of its component touches an earlier one.
fn grows_connected(g: &Graph, f: &Labeling) -> bool {
    let order = f.order();
    let mut placed = vec![false; g.n()];
    let comp_of = {
        let mut c = vec![0; g.n()];
        for (k, comp) in g.connected_components().iter().enumerate() {
            for &v in comp {
                c[v] = k;
            }
        }
        c
    };
    let mut started = vec![false; g.n()];
    for v in order {
        let touches = g.neighbors(v).iter().any(|&w| placed[w]);
        if !touches && std::mem::replace(&mut started[comp_of[v]], true) {
            return false;
        }
        placed[v] = true;
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn labelings_are_bijections(g in any_graph(40), seed in any::<u64>()) {
        prop_assert!(is_bijection(&gps_reorder(&g).unwrap(), g.n()));
        let f = am1_reorder(&g, seed).unwrap();
        prop_assert!(is_bijection(&f, g.n()));
        prop_assert!(grows_connected(&g, &f));
    }

    #[test]
    fn same_seed_same_labeling(g in connected(80), seed in any::<u64>()) {
        prop_assert_eq!(am1_reorder(&g, seed).unwrap(), am1_reorder(&g, seed).unwrap());
        prop_assert_eq!(gps_reorder(&g).unwrap(), gps_reorder(&g).unwrap());
    }

    #[test]
    fn incremental_importance_matches_recomputation(g in connected(60), seed in any::<u64>()) {
        prop_assert_eq!(am1_reorder(&g, seed).unwrap(), am1_reorder_with(&g, seed, Am1Mode::Naive).unwrap());
    }

    #[test]
    fn importance_lower_bounds_the_result(g in connected(120), seed in any::<u64>()) {
        let (f, log) = am1_reorder_logged(&g, seed).unwrap();
        let sbw = serial_bandwidth(&g, &f).unwrap();
        prop_assert_eq!(log.len(), g.n());
        for step in &log {
            prop_assert!(step.imp_first_open <= sbw, "imp {} > S_BW {}", step.imp_first_open, sbw);
            if let Some(m) = step.max_imp {
                prop_assert!(step.imp_first_open <= m);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn heuristics_never_beat_the_exact_minimum(g in any_graph(8), seed in any::<u64>()) {
        let (f, best) = exact_with(&g, true).unwrap();
        prop_assert_eq!(serial_bandwidth(&g, &f).unwrap(), best);
        prop_assert!(serial_bandwidth(&g, &gps_reorder(&g).unwrap()).unwrap() >= best);
        prop_assert!(serial_bandwidth(&g, &am1_reorder(&g, seed).unwrap()).unwrap() >= best);
    }
}

#[test]
fn paths_and_cycles_reach_the_minimum() {
    for n in 2..=8 {
        for g in [Graph::path(n), Graph::cycle(n.max(3))] {
            let best = exact_with(&g, true).unwrap().1;
            assert_eq!(serial_bandwidth(&g, &am1_reorder(&g, 42).unwrap()).unwrap(), best, "am1 n={n}");
            assert_eq!(serial_bandwidth(&g, &gps_reorder(&g).unwrap()).unwrap(), best, "gps n={n}");
        }
    }
}
