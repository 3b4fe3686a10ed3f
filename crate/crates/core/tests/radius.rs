use percofpp_core::lattice::Edge;
use percofpp_core::passage::{distance_field_until, extract_geodesic, WeightView};
use percofpp_core::radius::{
    build_bypass, effective_radius, exact_check, good_box_check, ExactOutcome, RadiusMode, RadiusParams,
};
use percofpp_core::{BoxRegion, CoupledEnvironment, Point, WeightLaw};

fn env(seed: u64, radius: u32, law: WeightLaw) -> CoupledEnvironment<2> {
    CoupledEnvironment::new(seed, BoxRegion::new(Point::origin(), radius), law).unwrap()
}

#[test]
fn good_box_on_open_lattice() {
    let e = Edge::along(Point::<2>::origin(), 0);
    let params = RadiusParams::new(1.0, 1.0, 20.0);
    let env = env(3, params.reach(8) + 1, WeightLaw::Dirac(1.0));
    let r = good_box_check(&env, &e, 8, &params, false).unwrap();
    assert_eq!((r.crossing, r.local_distances, r.geodesics_meet), (Some(true), Some(true), Some(true)));
    assert!(r.is_good());
}

#[test]
fn good_box_without_q_open_edges() {
    // Every weight is 2 > λ = 1, so nothing is q-open.
    let e = Edge::along(Point::<2>::origin(), 1);
    let params = RadiusParams::new(1.0, 1.0, 20.0);
    let env = env(3, params.reach(8) + 1, WeightLaw::Dirac(2.0));
    let r = good_box_check(&env, &e, 8, &params, true).unwrap();
    assert_eq!(r.crossing, Some(false));
    assert!(!r.is_good());
}

#[test]
fn exact_check_holds_on_open_lattice() {
    let e = Edge::along(Point::<2>::origin(), 0);
    let params = RadiusParams::new(1.0, 1.0, 20.0);
    let env = env(0, params.reach(4) + 1, WeightLaw::Dirac(1.0));
    assert!(matches!(exact_check(&env, &e, 4, &params).unwrap(), ExactOutcome::Holds { .. }));
}

#[test]
fn radius_depends_only_on_its_neighbourhood() {
    let law = WeightLaw::Dirac(1.0);
    let params = RadiusParams { n_max: 6, ..RadiusParams::new(0.85, 1.0, 20.0) };
    let e = Edge::along(Point::<2>::origin(), 0);
    for seed in 0..4 {
        let tight = env(seed, params.reach(params.n_max) + 1, law.clone());
        let wide = env(seed, params.reach(params.n_max) + 25, law.clone());
        let a = effective_radius(&tight, &e, &params, RadiusMode::Exact).unwrap();
        let b = effective_radius(&wide, &e, &params, RadiusMode::Exact).unwrap();
        assert_eq!(a.value, b.value, "seed {seed}");
        assert_eq!(a.censored_at, b.censored_at);
    }
}

#[test]
fn bypass_around_geodesic_edges() {
    let (p, n) = (0.85, 40);
    let params = RadiusParams { n_max: 7, ..RadiusParams::new(p, 1.0, 20.0) };
    let mut built = 0;
    for seed in 0..3 {
        let env = env(seed, n + params.reach(params.n_max) + 2, WeightLaw::Dirac(1.0));
        let view = WeightView::new(&env, p, Some(params.h), BoxRegion::new(Point::origin(), n).cuboid()).unwrap();
        let y = Point::on_axis(0, n as i32 / 2);
        let field = distance_field_until(&view, &Point::origin(), &y).unwrap();
        let g = extract_geodesic(&field, &view, &y).unwrap();
        let edges = g.edges();
        let e = edges[edges.len() / 2];
        let r = effective_radius(&env, &e, &params, RadiusMode::Exact).unwrap();
        let Some(radius) = r.value else { continue };
        let Ok(rec) = build_bypass(&g, &e, radius, &env, &params) else { continue };
        assert!(rec.verified(), "seed {seed}: {rec:?}");
        assert!(!rec.path.windows(2).any(|w| Edge::canonicalize(w[0], w[1]).unwrap() == e));
        built += 1;
    }
    assert!(built > 0);
}
