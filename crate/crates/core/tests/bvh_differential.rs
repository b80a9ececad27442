//! BVH queries against brute force over every box.

mod common;

use common::{oracle, worlds};
use proptest::prelude::*;
use tastar_core::{Bvh, ObstacleBox, Vec3};

#[test]
fn ten_thousand_queries_of_each_kind() {
    let mut r = worlds::rng(1);
    for (n, inflation) in [(200, 1.5), (50, 0.0), (1, 2.0)] {
        let boxes = worlds::world(&mut r, n);
        let m = worlds::check(&mut r, &boxes, inflation, 10_000);
        assert_eq!((m.distance, m.segment), (0, 0), "{n} boxes: {m:?}");
    }
}

#[test]
fn empty_world() {
    let bvh = Bvh::build(&[], 1.5).unwrap();
    assert!(bvh.is_empty() && bvh.distance(Vec3::ZERO) == f64::INFINITY);
    assert!(!bvh.segment_occluded(Vec3::ZERO, Vec3::new(1.0, 2.0, 3.0)));
    assert_eq!(bvh.distance_within(Vec3::ZERO, 4.0), 4.0);
}

#[test]
fn bounds_nest_and_depth_is_logarithmic() {
    let mut r = worlds::rng(2);
    let boxes = worlds::world(&mut r, 200);
    let bvh = Bvh::build(&boxes, 1.5).unwrap();
    assert!(bvh.bounds_are_nested());
    assert!(bvh.depth() <= 10, "depth {}", bvh.depth());
}

fn arb_box() -> impl Strategy<Value = ObstacleBox> {
    (
        (-30.0f64..30.0, -30.0f64..30.0, 0.0f64..20.0),
        (0.05f64..6.0, 0.05f64..6.0, 0.05f64..6.0),
        prop_oneof![Just(0.0), -3.2f64..3.2],
    )
        .prop_map(|((x, y, z), (hx, hy, hz), yaw)| ObstacleBox::new(Vec3::new(x, y, z), Vec3::new(hx, hy, hz), yaw, "b").unwrap())
}

fn arb_point() -> impl Strategy<Value = Vec3> {
    (-40.0f64..40.0, -40.0f64..40.0, -5.0f64..30.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn prop_distance_matches(boxes in prop::collection::vec(arb_box(), 0..40), p in arb_point(), infl in 0.0f64..2.0) {
        let got = Bvh::build(&boxes, infl).unwrap().distance(p);
        let want = oracle::distance(&boxes, infl, p);
        prop_assert!(got == want || (got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn prop_bounded_distance_is_clamped(boxes in prop::collection::vec(arb_box(), 0..40), p in arb_point(), limit in 0.0f64..10.0) {
        let bvh = Bvh::build(&boxes, 1.5).unwrap();
        prop_assert_eq!(bvh.distance_within(p, limit).to_bits(), bvh.distance(p).min(limit).to_bits());
    }

    #[test]
    fn prop_segments_match(boxes in prop::collection::vec(arb_box(), 0..40), a in arb_point(), b in arb_point()) {
        let bvh = Bvh::build(&boxes, 1.5).unwrap();
        prop_assert_eq!(bvh.segment_occluded(a, b), oracle::occluded(&boxes, a, b));
    }

    #[test]
    fn prop_inflation_is_monotone(boxes in prop::collection::vec(arb_box(), 1..20), p in arb_point(), d1 in 0.0f64..2.0, extra in 0.0f64..2.0) {
        let lo = Bvh::build(&boxes, d1).unwrap().distance(p);
        let hi = Bvh::build(&boxes, d1 + extra).unwrap().distance(p);
        prop_assert!(hi <= lo);
    }

    #[test]
    fn prop_build_is_deterministic(boxes in prop::collection::vec(arb_box(), 0..30), p in arb_point()) {
        let a = Bvh::build(&boxes, 1.5).unwrap();
        let b = Bvh::build(&boxes, 1.5).unwrap();
        prop_assert_eq!(a.distance(p).to_bits(), b.distance(p).to_bits());
        prop_assert_eq!(a.depth(), b.depth());
    }
}
