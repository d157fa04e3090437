use std::collections::BTreeMap;

use meshstream::pipegen::*;
use proptest::prelude::*;

const INPUTS: [&str; 4] = ["a", "b", "c", "d"];

fn expr(names: Vec<String>) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        4 => proptest::sample::select(names),
        1 => (1u32..50).prop_map(|k| format!("{}", k as f64 / 8.0)),
    ];
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), proptest::sample::select(vec!["+", "-", "*", "/"]))
                .prop_map(|(l, r, op)| format!("({l} {op} {r})")),
            inner.clone().prop_map(|e| format!("sqrt(abs({e}))")),
            inner.clone().prop_map(|e| format!("abs({e})")),
            inner.prop_map(|e| format!("-({e})")),
        ]
    })
}

/// Two to four equations; each may use the inputs and every earlier name.
fn program() -> impl Strategy<Value = String> {
    let base: Vec<String> = INPUTS.iter().map(|s| s.to_string()).collect();
    (expr(base.clone()), expr([base.clone(), vec!["t0".into()]].concat()), expr([base, vec!["t0".into(), "t1".into()]].concat()))
        .prop_map(|(e0, e1, e2)| format!("t0 = {e0}\nt1 = {e1}\nt2 = {e2}\noutput t0\n"))
}

fn same(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|((ka, va), (kb, vb))| ka == kb && (va.to_bits() == vb.to_bits() || (va.is_nan() && vb.is_nan())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn leveling_and_clustering_preserve_values(
        text in program(),
        xs in proptest::collection::vec(-4.0f64..4.0, 4),
        seed in any::<u64>(),
        io_limit in 4usize..12,
        band_rows in 1usize..4,
    ) {
        let raw = parse_equations(&text).unwrap();
        let inputs: BTreeMap<String, f64> = INPUTS.iter().zip(&xs).map(|(k, &v)| (k.to_string(), v)).collect();
        let want = evaluate(&raw, &inputs).unwrap();

        let lat = Latencies::default();
        let mut g = level_and_insert_delays(&raw, &lat).unwrap();
        prop_assert!(check_leveled(&g, &lat).is_ok(), "{:?}", check_leveled(&g, &lat));
        prop_assert_eq!(g.count_ops(), raw.count_ops());
        prop_assert!(same(&evaluate(&g, &inputs).unwrap(), &want));

        let report = order_horizontally(&mut g, seed, 3);
        prop_assert!(report.refined <= report.barycenter);
        prop_assert_eq!(report.refined, objective(&g));

        let plan = cluster_rectangles(&g, io_limit, band_rows).unwrap();
        prop_assert!(plan.validate().is_ok());
        prop_assert!(plan.clusters.iter().all(|c| c.io() <= io_limit));
        let mut owner = vec![0usize; g.len()];
        for c in &plan.clusters {
            for &m in &c.members {
                owner[m] += 1;
            }
        }
        for (v, vx) in plan.graph.vertices.iter().enumerate() {
            let want_count = usize::from(!matches!(vx.kind, VertexKind::Input { .. }));
            prop_assert_eq!(owner[v], want_count, "vertex {}", v);
        }
        prop_assert!(same(&evaluate_clustered(&plan, &inputs).unwrap(), &want));
        prop_assert_eq!(load_plan(&emit_plan(&plan).unwrap()).unwrap(), plan);
    }

    #[test]
    fn depth_is_the_latest_ready_time(text in program()) {
        let g = level_and_insert_delays(&parse_equations(&text).unwrap(), &Latencies::default()).unwrap();
        prop_assert_eq!(g.depth(), g.vertices.iter().map(|v| v.ready).max().unwrap());
        let again = level_and_insert_delays(&g, &Latencies::default()).unwrap();
        prop_assert_eq!(again, g);
    }
}
