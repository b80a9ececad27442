//! Feasibility, desired viewpoint, transition cost and the multi-ray
//! visibility evaluator.

use alloc::vec::Vec;

use crate::bvh::Bvh;
use crate::config::{PlannerConfig, RayCount};
use crate::geometry::Vec3;
use crate::scenario::TargetTrajectory;

/// Target body sample offsets, relative to the target position.
#[derive(Clone, Debug, PartialEq)]
pub struct RaySet {
    offsets: Vec<Vec3>,
}

/// Central axis, head, feet, and two lateral body samples.
pub const R5: [Vec3; 5] = [
    Vec3::new(0.0, 0.0, 0.0),
    Vec3::new(0.0, 0.0, 0.8),
    Vec3::new(0.0, 0.0, -0.6),
    Vec3::new(0.3, 0.0, 0.0),
    Vec3::new(-0.3, 0.0, 0.0),
];

impl RaySet {
    /// The first `n` offsets of the five-ray set.
    pub fn subset(n: RayCount) -> RaySet {
        RaySet { offsets: R5[..n.count()].to_vec() }
    }

    pub fn full() -> RaySet {
        RaySet::subset(RayCount::Five)
    }

    pub fn offsets(&self) -> &[Vec3] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Fraction of rays from `s` to `p + o` that no obstacle blocks.
pub fn visibility(s: Vec3, p: Vec3, bvh: &Bvh, rays: &RaySet) -> f64 {
    let clear = rays.offsets.iter().filter(|&&o| !bvh.segment_occluded(s, p + o)).count();
    clear as f64 / rays.offsets.len() as f64
}

/// Unit target heading at layer `t`.
///
/// Uses the backward difference `(p_t - p_{t-1}) / dt` when its speed is at
/// least `eps`; otherwise the most recent such heading; otherwise `+x`. Layer
/// 0 has no backward difference and takes the heading of layer 1.
pub fn target_heading(target: &TargetTrajectory, t: usize, eps: f64) -> Vec3 {
    let t = t.max(1).min(target.horizon());
    for k in (1..=t).rev() {
        let v = (target.waypoints[k] - target.waypoints[k - 1]) * (1.0 / target.dt);
        if v.norm() >= eps {
            if let Some(u) = v.normalized() {
                return u;
            }
        }
    }
    Vec3::X
}

/// Headings for every layer `0..=T`, computed in one pass.
pub fn target_headings(target: &TargetTrajectory, eps: f64) -> Vec<Vec3> {
    let n = target.waypoints.len();
    let mut out = Vec::with_capacity(n);
    let mut last = Vec3::X;
    for t in 1..n {
        let v = (target.waypoints[t] - target.waypoints[t - 1]) * (1.0 / target.dt);
        if v.norm() >= eps {
            if let Some(u) = v.normalized() {
                last = u;
            }
        }
        out.push(last);
    }
    let first = out.first().copied().unwrap_or(Vec3::X);
    out.insert(0, first);
    out
}

/// `q = p - d_behind * heading + (z_ref - p.z) * e_z`.
pub fn desired_viewpoint(p: Vec3, heading: Vec3, cfg: &PlannerConfig) -> Vec3 {
    p - heading * cfg.d_behind + Vec3::Z * (cfg.z_ref - p.z)
}

/// Altitude band, camera range and clearance. `clearance` is the distance to
/// the inflated obstacle set.
pub fn is_feasible_with_clearance(s: Vec3, p: Vec3, clearance: f64, cfg: &PlannerConfig) -> bool {
    in_altitude_and_range(s, p, cfg) && clearance >= cfg.d_safe
}

pub fn is_feasible_state(s: Vec3, p: Vec3, bvh: &Bvh, cfg: &PlannerConfig) -> bool {
    in_altitude_and_range(s, p, cfg) && bvh.distance(s) >= cfg.d_safe
}

#[inline]
pub fn in_altitude_and_range(s: Vec3, p: Vec3, cfg: &PlannerConfig) -> bool {
    if s.z < cfg.z_min || s.z > cfg.z_max {
        return false;
    }
    let r = s.distance(p);
    r >= cfg.d_cam_min && r <= cfg.d_cam_max
}

/// Step length within `v_max * dt`. Collision is checked at endpoints only.
pub fn is_admissible_edge(a: Vec3, b: Vec3, cfg: &PlannerConfig) -> bool {
    a.distance(b) <= cfg.max_step()
}

/// Weighted transition-cost terms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CostTerms {
    pub path: f64,
    pub tracking: f64,
    pub visibility: f64,
    pub safety: f64,
    pub smoothness: f64,
}

impl CostTerms {
    pub fn total(&self) -> f64 {
        self.path + self.tracking + self.visibility + self.safety + self.smoothness
    }
}

impl core::ops::AddAssign for CostTerms {
    fn add_assign(&mut self, o: CostTerms) {
        self.path += o.path;
        self.tracking += o.tracking;
        self.visibility += o.visibility;
        self.safety += o.safety;
        self.smoothness += o.smoothness;
    }
}

/// Cost of moving `a -> b` at a layer whose desired viewpoint is `q`, given the
/// visibility `vis_b` and obstacle distance `dist_b` evaluated at `b`.
pub fn transition_terms(a: Vec3, b: Vec3, q: Vec3, vis_b: f64, dist_b: f64, cfg: &PlannerConfig) -> CostTerms {
    let w = &cfg.weights;
    let proximity = (cfg.d_influence - dist_b).max(0.0) / cfg.d_influence;
    CostTerms {
        path: w.path * a.distance(b),
        tracking: w.tracking * b.distance(q) / cfg.d_behind.max(1.0),
        visibility: w.visibility * (1.0 - vis_b),
        safety: w.safety * proximity * proximity,
        smoothness: w.smoothness * (b.z - a.z).abs(),
    }
}

pub fn transition_cost(a: Vec3, b: Vec3, q: Vec3, vis_b: f64, dist_b: f64, cfg: &PlannerConfig) -> f64 {
    transition_terms(a, b, q, vis_b, dist_b, cfg).total()
}
