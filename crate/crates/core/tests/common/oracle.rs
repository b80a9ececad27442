//! Brute-force reference implementations for differential tests.
//!
//! Everything here is written straight from the definitions with no
//! acceleration structure: point-to-box distance and segment tests loop over
//! every box, and the planner oracle is plain dynamic programming over the
//! full layered graph (every one of the 27 neighbour cells, step length
//! checked in metres). Only the corridor predicate and voxel snapping are
//! shared with the library.

#![allow(dead_code)]

use tastar_core::generator::{generate_synthetic_cohort, CohortOptions, Profile};
use tastar_core::{Corridor, ObstacleBox, ParamOverrides, PlannerConfig, Scenario, Vec3, VoxelIndex};

fn local(b: &ObstacleBox, p: Vec3) -> [f64; 3] {
    let (s, c) = b.yaw.sin_cos();
    let (dx, dy, dz) = (p.x - b.center.x, p.y - b.center.y, p.z - b.center.z);
    [c * dx + s * dy, -s * dx + c * dy, dz]
}

/// Distance from `p` to box `b` grown by `inflation`; 0 inside.
pub fn box_distance(b: &ObstacleBox, inflation: f64, p: Vec3) -> f64 {
    let l = local(b, p);
    let h = [b.half_extents.x + inflation, b.half_extents.y + inflation, b.half_extents.z + inflation];
    let mut sq = 0.0;
    for i in 0..3 {
        let q = (l[i].abs() - h[i]).max(0.0);
        sq += q * q;
    }
    sq.sqrt()
}

pub fn distance(boxes: &[ObstacleBox], inflation: f64, p: Vec3) -> f64 {
    boxes.iter().map(|b| box_distance(b, inflation, p)).fold(f64::INFINITY, f64::min)
}

/// Does the open segment `(a, b)` meet the closed raw box?
pub fn segment_hits_box(bx: &ObstacleBox, a: Vec3, b: Vec3) -> bool {
    let la = local(bx, a);
    let lb = local(bx, b);
    let h = [bx.half_extents.x, bx.half_extents.y, bx.half_extents.z];
    if la == lb {
        return (0..3).all(|i| la[i].abs() <= h[i]);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for i in 0..3 {
        let d = lb[i] - la[i];
        if d == 0.0 {
            if la[i].abs() > h[i] {
                return false;
            }
            continue;
        }
        let t0 = (-h[i] - la[i]) / d;
        let t1 = (h[i] - la[i]) / d;
        lo = lo.max(t0.min(t1));
        hi = hi.min(t0.max(t1));
    }
    lo <= hi && lo < 1.0 && hi > 0.0
}

pub fn occluded(boxes: &[ObstacleBox], a: Vec3, b: Vec3) -> bool {
    boxes.iter().any(|bx| segment_hits_box(bx, a, b))
}

/// Target body sample offsets, in ray-subset order.
pub const BODY: [[f64; 3]; 5] = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.8], [0.0, 0.0, -0.6], [0.3, 0.0, 0.0], [-0.3, 0.0, 0.0]];

pub fn visibility(boxes: &[ObstacleBox], s: Vec3, p: Vec3, rays: usize) -> f64 {
    let clear = BODY[..rays].iter().filter(|o| !occluded(boxes, s, Vec3::new(p.x + o[0], p.y + o[1], p.z + o[2]))).count();
    clear as f64 / rays as f64
}

/// Desired viewpoint for every layer.
pub fn viewpoints(s: &Scenario, cfg: &PlannerConfig) -> Vec<Vec3> {
    let w = &s.target.waypoints;
    let mut heads = vec![Vec3::new(1.0, 0.0, 0.0); w.len()];
    let mut last = Vec3::new(1.0, 0.0, 0.0);
    for t in 1..w.len() {
        let v = (w[t] - w[t - 1]) * (1.0 / s.target.dt);
        let n = v.norm();
        if n >= cfg.heading_eps && n > 0.0 {
            last = v * (1.0 / n);
        }
        heads[t] = last;
    }
    if w.len() > 1 {
        heads[0] = heads[1];
    }
    w.iter()
        .zip(&heads)
        .map(|(p, h)| Vec3::new(p.x - cfg.d_behind * h.x, p.y - cfg.d_behind * h.y, p.z - cfg.d_behind * h.z + (cfg.z_ref - p.z)))
        .collect()
}

pub fn edge_cost(a: Vec3, b: Vec3, q: Vec3, vis: f64, dist: f64, cfg: &PlannerConfig) -> f64 {
    let w = &cfg.weights;
    let near = if dist < cfg.d_influence { (cfg.d_influence - dist) / cfg.d_influence } else { 0.0 };
    w.path * (b - a).norm()
        + w.tracking * (b - q).norm() / if cfg.d_behind > 1.0 { cfg.d_behind } else { 1.0 }
        + w.visibility * (1.0 - vis)
        + w.safety * near * near
        + w.smoothness * (b.z - a.z).abs()
}

pub struct Solution {
    /// Optimal total cost; `None` when some layer has no reachable state.
    pub cost: Option<f64>,
    /// Largest number of reachable states in any layer.
    pub max_layer: usize,
}

struct Geo<'a> {
    s: &'a Scenario,
    cfg: PlannerConfig,
    corridor: Corridor,
}

impl Geo<'_> {
    fn center(&self, v: VoxelIndex) -> Vec3 {
        let g = self.cfg.grid();
        Vec3::new(g.origin.x + v.ix as f64 * g.dxy, g.origin.y + v.iy as f64 * g.dxy, g.origin.z + v.iz as f64 * g.dz)
    }

    /// Reachable at layer `t`: `(distance, visibility)` if the state is admitted.
    fn state(&self, v: VoxelIndex, t: usize) -> Option<(f64, f64)> {
        let c = self.center(v);
        let p = self.s.target.waypoints[t];
        let r = (c - p).norm();
        if !self.corridor.admits(v) || c.z < self.cfg.z_min || c.z > self.cfg.z_max {
            return None;
        }
        if r < self.cfg.d_cam_min || r > self.cfg.d_cam_max {
            return None;
        }
        let d = distance(&self.s.obstacles, self.cfg.d_safe, c);
        if d < self.cfg.d_safe {
            return None;
        }
        let vis = visibility(&self.s.obstacles, c, p, self.cfg.ray_count.count());
        (vis >= self.cfg.v_min).then_some((d, vis))
    }
}

/// Exact layered DP. `cfg` is the caller's configuration before the
/// scenario's overrides; beam, cap, cache and structure are ignored.
pub fn solve(s: &Scenario, cfg: &PlannerConfig) -> Solution {
    use std::collections::BTreeMap;
    let cfg = cfg.with_overrides(&s.params);
    let grid = cfg.grid();
    let corridor = Corridor::build(&s.target.waypoints, &s.obstacles, &grid, cfg.corridor_half_width, cfg.d_influence);
    let geo = Geo { s, cfg, corridor };
    let q = viewpoints(s, &cfg);
    let step = cfg.v_max * cfg.dt;
    let mut moves = Vec::new();
    for dx in -1i32..=1 {
        for dy in -1i32..=1 {
            for dz in -1i32..=1 {
                let m = Vec3::new(dx as f64 * cfg.dxy, dy as f64 * cfg.dxy, dz as f64 * cfg.dz);
                if m.norm() <= step {
                    moves.push((dx, dy, dz));
                }
            }
        }
    }
    let mut layer: BTreeMap<VoxelIndex, f64> = BTreeMap::new();
    layer.insert(grid.snap(s.start), 0.0);
    let mut max_layer = 1;
    for t in 1..s.target.waypoints.len() {
        let mut next: BTreeMap<VoxelIndex, f64> = BTreeMap::new();
        let mut states: BTreeMap<VoxelIndex, Option<(f64, f64)>> = BTreeMap::new();
        for (&u, &g) in &layer {
            let a = geo.center(u);
            for &(dx, dy, dz) in &moves {
                let v = VoxelIndex::new(u.ix + dx, u.iy + dy, u.iz + dz);
                let Some((d, vis)) = *states.entry(v).or_insert_with(|| geo.state(v, t)) else { continue };
                let c = g + edge_cost(a, geo.center(v), q[t], vis, d, &cfg);
                let e = next.entry(v).or_insert(f64::INFINITY);
                if c < *e {
                    *e = c;
                }
            }
        }
        if next.is_empty() {
            return Solution { cost: None, max_layer };
        }
        max_layer = max_layer.max(next.len());
        layer = next;
    }
    Solution { cost: layer.values().copied().reduce(f64::min), max_layer }
}

/// Are all states feasible and all steps admissible, checked from scratch?
pub fn trajectory_ok(s: &Scenario, cfg: &PlannerConfig, traj: &[Vec3]) -> Result<(), String> {
    let cfg = cfg.with_overrides(&s.params);
    if traj.len() != s.target.waypoints.len() {
        return Err(format!("{} states for {} waypoints", traj.len(), s.target.waypoints.len()));
    }
    if traj[0] != {
        let g = cfg.grid();
        let v = g.snap(s.start);
        g.center(v)
    } {
        return Err("first state is not the snapped start".into());
    }
    for (t, (&x, &p)) in traj.iter().zip(&s.target.waypoints).enumerate() {
        let r = (x - p).norm();
        let d = distance(&s.obstacles, cfg.d_safe, x);
        if x.z < cfg.z_min || x.z > cfg.z_max || r < cfg.d_cam_min || r > cfg.d_cam_max || d < cfg.d_safe {
            return Err(format!("state {t} infeasible: z {}, range {r}, clearance {d}", x.z));
        }
        if t > 0 && (x - traj[t - 1]).norm() > cfg.v_max * cfg.dt {
            return Err(format!("step {t} too long"));
        }
    }
    Ok(())
}

/// Relative agreement used throughout.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Short-horizon settings: a tight camera range around a low, close
/// viewpoint keeps every layer small even over a dozen layers.
pub fn tight_params() -> ParamOverrides {
    ParamOverrides { d_cam_max: Some(15.0), d_behind: Some(8.0), z_ref: Some(10.0), ..ParamOverrides::default() }
}

/// Profiles usable at a few metres of target path; the pocket maze needs a
/// long approach.
pub fn small_profiles() -> Vec<Profile> {
    Profile::ALL.into_iter().filter(|p| *p != Profile::PocketMaze).collect()
}

/// Canopies leave no pose within 15 m of the target above the vegetation
/// profile's crowns.
pub fn tight_ok(p: Profile) -> bool {
    p != Profile::VegetationLike
}

/// Seeded small scenarios: `per_profile` with T of 3-6 under default
/// parameters and `per_profile` with T of 10-12 under [`tight_params`] where the
/// profile allows it.
pub fn small_scenarios(seed: u64, per_profile: usize) -> Vec<Scenario> {
    let short = CohortOptions { length_range: (2.1, 4.2), ..CohortOptions::default() };
    let long = CohortOptions { length_range: (7.0, 8.4), params: tight_params() };
    let mut out = Vec::new();
    for p in small_profiles() {
        out.extend(generate_synthetic_cohort(seed, per_profile, p, &short).expect("short cohort"));
        if !tight_ok(p) {
            continue;
        }
        let mut l = generate_synthetic_cohort(seed ^ 0x5eed, per_profile, p, &long).expect("tight cohort");
        for s in &mut l {
            s.id = format!("{}.t{}", p.name(), &s.id[s.id.len() - 4..]);
        }
        out.extend(l);
    }
    out
}
