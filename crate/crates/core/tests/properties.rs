use proptest::prelude::*;

use percofpp_core::animals::{gamma_max, IndicatorField};
use percofpp_core::lattice::Edge;
use percofpp_core::passage::{passage_time, WeightView};
use percofpp_core::percolation::{label_clusters, Openness};
use percofpp_core::{BoxRegion, CoupledEnvironment, Point, WeightLaw};

fn law() -> impl Strategy<Value = WeightLaw> {
    prop_oneof![
        (0.1f64..3.0).prop_map(WeightLaw::Dirac),
        (0.0f64..1.0, 1.0f64..3.0).prop_map(|(lo, w)| WeightLaw::Uniform { lo, hi: lo + w }),
        Just("atoms:0.5:0.25,1:0.5,2.25:0.25".parse().unwrap()),
    ]
}

fn env(seed: u64, radius: u32, law: WeightLaw) -> CoupledEnvironment<2> {
    CoupledEnvironment::new(seed, BoxRegion::new(Point::origin(), radius), law).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weights_decrease_in_p(seed: u64, law in law(), x in -20i32..20, y in -20i32..20, axis in 0usize..2,
                             p in 0.0f64..1.0, dp in 0.0f64..1.0) {
        let env = env(seed, 21, law);
        let e = Edge::along(Point([x, y]), axis);
        let hi = p + dp * (1.0 - p);
        prop_assert!(env.weight(&e, hi).unwrap() <= env.weight(&e, p).unwrap());
        let (u, _) = env.uniforms(&e).unwrap();
        prop_assert_eq!(env.is_p_open(&e, p).unwrap(), u <= p);
    }

    #[test]
    fn window_does_not_change_weights(seed: u64, x in -5i32..5, y in -5i32..5, p in 0.6f64..1.0) {
        let small = env(seed, 6, WeightLaw::Uniform { lo: 0.0, hi: 1.0 });
        let big = env(seed, 40, WeightLaw::Uniform { lo: 0.0, hi: 1.0 });
        let e = Edge::along(Point([x, y]), 0);
        prop_assert_eq!(small.weight(&e, p).unwrap(), big.weight(&e, p).unwrap());
    }

    #[test]
    fn truncated_time_decreases_in_p(seed: u64, law in law(), n in 2u32..12, p in 0.6f64..1.0, dp in 0.0f64..0.4) {
        let k = n + 3;
        let env = env(seed, k, law);
        let region = BoxRegion::new(Point::origin(), k).cuboid();
        let y = Point::on_axis(0, n as i32);
        let m = 5.0;
        let hi = (p + dp).min(1.0);
        let t_lo = passage_time(&WeightView::new(&env, p, Some(m), region.clone()).unwrap(), &Point::origin(), &y).unwrap();
        let t_hi = passage_time(&WeightView::new(&env, hi, Some(m), region).unwrap(), &Point::origin(), &y).unwrap();
        prop_assert!(t_hi <= t_lo);
        prop_assert!(t_lo <= m * n as f64);
    }

    #[test]
    fn passage_time_is_subadditive(seed: u64, law in law(), a in 1i32..7, b in 1i32..6, c in -4i32..4) {
        let env = env(seed, 12, law);
        let view = WeightView::new(&env, 1.0, None, BoxRegion::new(Point::origin(), 12).cuboid()).unwrap();
        let (o, y, z) = (Point::origin(), Point([a, c]), Point([a + b, 0]));
        let direct = passage_time(&view, &o, &z).unwrap();
        let split = passage_time(&view, &o, &y).unwrap() + passage_time(&view, &y, &z).unwrap();
        prop_assert!(direct <= split * (1.0 + 1e-12));
        let back = passage_time(&view, &z, &o).unwrap();
        prop_assert!((direct - back).abs() <= 1e-12 * direct);
    }

    #[test]
    fn q_clusters_sit_inside_p_clusters(seed: u64, p in 0.6f64..1.0) {
        let env = env(seed, 10, WeightLaw::Uniform { lo: 0.0, hi: 2.0 });
        let w = BoxRegion::new(Point::origin(), 10).cuboid();
        let q = label_clusters(&env, &w, Openness::Q { p, lambda: 1.0 }).unwrap();
        let pp = label_clusters(&env, &w, Openness::P { p }).unwrap();
        for e in w.edges() {
            if q.same_cluster(&e.x(), &e.y()) {
                prop_assert!(pp.same_cluster(&e.x(), &e.y()));
            }
        }
    }

    #[test]
    fn gamma_grows_with_length(seed: u64, q in 0.0f64..1.0) {
        let field = IndicatorField::<2>::iid(seed, 7, 2, q).unwrap();
        let mut last = 0;
        for l in 0..=7 {
            let g = gamma_max(&field, l).unwrap().gamma;
            prop_assert!(g >= last && g <= l);
            last = g;
        }
    }

    #[test]
    fn gamma_grows_with_the_field(seed: u64, q in 0.0f64..0.7, extra in 0.0f64..0.3) {
        let base = IndicatorField::<2>::iid(seed, 6, 2, q).unwrap();
        let more = IndicatorField::<2>::iid(seed, 6, 2, q + extra).unwrap();
        for l in [2, 4, 6] {
            prop_assert!(gamma_max(&more, l).unwrap().gamma >= gamma_max(&base, l).unwrap().gamma);
        }
    }
}
