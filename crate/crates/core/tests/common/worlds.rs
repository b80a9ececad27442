//! Seeded random box worlds for BVH differential checks.

#![allow(dead_code)]

use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};
use tastar_core::{Bvh, ObstacleBox, Vec3};

use super::oracle;

pub fn rng(seed: u8) -> TestRng {
    TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32])
}

fn point(r: &mut TestRng) -> Vec3 {
    Vec3::new(r.random_range(-60.0..60.0), r.random_range(-60.0..60.0), r.random_range(-5.0..45.0))
}

/// `n` boxes of mixed size and yaw in a 100 m x 100 m x 40 m block; about a
/// third are axis-aligned.
pub fn world(r: &mut TestRng, n: usize) -> Vec<ObstacleBox> {
    (0..n)
        .map(|_| {
            let c = Vec3::new(r.random_range(-50.0..50.0), r.random_range(-50.0..50.0), r.random_range(0.0..40.0));
            let h = Vec3::new(r.random_range(0.05..8.0), r.random_range(0.05..8.0), r.random_range(0.05..10.0));
            let yaw = if r.random_range(0..3) == 0 { 0.0 } else { r.random_range(-3.2..3.2) };
            ObstacleBox::new(c, h, yaw, "box").unwrap()
        })
        .collect()
}

#[derive(Debug, Default)]
pub struct Mismatches {
    pub distance: usize,
    pub segment: usize,
    pub worst_rel: f64,
}

/// Runs `queries` distance and `queries` segment queries against brute force.
pub fn check(r: &mut TestRng, boxes: &[ObstacleBox], inflation: f64, queries: usize) -> Mismatches {
    let bvh = Bvh::build(boxes, inflation).unwrap();
    let mut m = Mismatches::default();
    for _ in 0..queries {
        let p = point(r);
        let (got, want) = (bvh.distance(p), oracle::distance(boxes, inflation, p));
        let rel = if got == want { 0.0 } else { (got - want).abs() / want.abs().max(1e-300) };
        m.worst_rel = m.worst_rel.max(rel);
        if rel > 1e-9 {
            m.distance += 1;
        }
        let (a, b) = (point(r), point(r));
        if bvh.segment_occluded(a, b) != oracle::occluded(boxes, a, b) {
            m.segment += 1;
        }
    }
    m
}
