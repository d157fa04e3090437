mod common;

use meshstream::eulerfv::{FlowField, Primitive, GAMMA};
use meshstream::meshcore::BoundaryKind;
use proptest::prelude::*;

use common::*;

fn state() -> impl Strategy<Value = Primitive> {
    (0.1f64..5.0, -3.0f64..3.0, -3.0f64..3.0, 0.1f64..10.0).prop_map(|(rho, u, v, p)| Primitive { rho, u, v, p })
}

/// A state and a second one within a moderate jump of it.
fn pair(base: impl Strategy<Value = Primitive>) -> impl Strategy<Value = (Primitive, Primitive)> {
    (base, 0.5f64..2.0, 0.5f64..2.0, -0.5f64..0.5, -0.5f64..0.5).prop_map(|(a, fr, fp, du, dv)| {
        (a, Primitive { rho: a.rho * fr, p: a.p * fp, u: a.u + du, v: a.v + dv })
    })
}

/// Flow slow enough that wall reflections stay mild.
fn subsonic() -> impl Strategy<Value = Primitive> {
    (0.5f64..2.0, -0.3f64..0.3, -0.3f64..0.3, 0.5f64..2.0).prop_map(|(rho, u, v, p)| Primitive { rho, u, v, p })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uniform_flow_is_a_fixed_point(nx in 1usize..8, ny in 1usize..8, seed in any::<u64>(), w in state(), cfl in 0.05f64..0.9) {
        let mesh = jittered_mesh(nx, ny, seed, BoundaryKind::Outflow);
        let mut field = FlowField::new(&mesh, GAMMA, w, |_| w).unwrap();
        let before = field.state.clone();
        let dt = field.stable_dt(cfl);
        field.timestep(dt).unwrap();
        for (a, b) in field.state.iter().zip(&before) {
            for k in 0..4 {
                prop_assert!((a[k] - b[k]).abs() <= 1e-13 * b[k].abs().max(1.0), "{} vs {}", a[k], b[k]);
            }
        }
    }

    #[test]
    fn walls_conserve_mass(nx in 2usize..8, ny in 2usize..8, seed in any::<u64>(), (lo, hi) in pair(subsonic())) {
        let mesh = jittered_mesh(nx, ny, seed, BoundaryKind::Wall);
        let mid = nx as f64 / 2.0;
        let mut field = FlowField::new(&mesh, GAMMA, lo, |c| if c[0] < mid { lo } else { hi }).unwrap();
        for _ in 0..10 {
            let m0 = field.total_mass();
            let dt = field.stable_dt(0.4);
            field.timestep(dt).unwrap();
            prop_assert!((field.total_mass() - m0).abs() <= 1e-12 * m0);
        }
    }

    #[test]
    fn storage_order_does_not_change_the_result(nx in 1usize..7, ny in 1usize..7, seed in any::<u64>(), (lo, hi) in pair(state())) {
        let mesh = jittered_mesh(nx, ny, seed, BoundaryKind::Outflow);
        let init = |c: [f64; 2]| if c[1] < ny as f64 / 2.0 { lo } else { hi };
        let f = permutation(mesh.num_triangles(), seed ^ 1);
        let mut a = FlowField::new(&mesh, GAMMA, lo, init).unwrap();
        let mut b = FlowField::with_labeling(&mesh, &f, GAMMA, lo, init).unwrap();
        let dt = a.stable_dt(0.3).min(b.stable_dt(0.3));
        for _ in 0..3 {
            a.timestep(dt).unwrap();
            b.timestep(dt).unwrap();
        }
        prop_assert_eq!(a.states_in_mesh_order(), b.states_in_mesh_order());
    }
}
