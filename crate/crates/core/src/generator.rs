//! Seeded synthetic scenario worlds.
//!
//! Randomness comes from SplitMix64 only: a master stream seeded from the
//! cohort seed and the profile yields one seed per scenario, and each
//! scenario draws everything from its own stream. Unit floats are the top 53
//! bits of a draw scaled by `2^-53`. Targets walk at 1.4 m/s with `dt = 0.5 s`,
//! so every waypoint step is exactly 0.7 m.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{atan2, cos, round, sin};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::bvh::Bvh;
use crate::config::{ParamOverrides, PlannerConfig};
use crate::corridor::{polyline_distance_xy, Corridor};
use crate::geometry::{Aabb, ObstacleBox, Vec3};
use crate::grid::VoxelIndex;
use crate::objective::{desired_viewpoint, in_altitude_and_range, target_headings};
use crate::scenario::{Scenario, ScenarioError, TargetTrajectory};

pub const TARGET_SPEED: f64 = 1.4;
pub const DT: f64 = 0.5;
pub const STEP: f64 = TARGET_SPEED * DT;
/// Search radius, in voxels, for a feasible start near the nominal one.
pub const START_SEARCH_RADIUS: i32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    Open,
    UrbanSparse,
    UrbanDense,
    Canyon,
    VegetationLike,
    Highway,
    PocketMaze,
    OcclusionPocket,
}

impl Profile {
    pub const ALL: [Profile; 8] = [
        Profile::Open,
        Profile::UrbanSparse,
        Profile::UrbanDense,
        Profile::Canyon,
        Profile::VegetationLike,
        Profile::Highway,
        Profile::PocketMaze,
        Profile::OcclusionPocket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Open => "open",
            Profile::UrbanSparse => "urban-sparse",
            Profile::UrbanDense => "urban-dense",
            Profile::Canyon => "canyon",
            Profile::VegetationLike => "vegetation-like",
            Profile::Highway => "highway",
            Profile::PocketMaze => "pocket-maze",
            Profile::OcclusionPocket => "occlusion-pocket",
        }
    }

    pub fn parse(s: &str) -> Option<Profile> {
        Profile::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Overrides every scenario of the profile carries unless the cohort
    /// options set the same field. pocket-maze widens the camera range so the
    /// reachable set per layer is several times the default beam.
    pub fn params(self) -> ParamOverrides {
        match self {
            Profile::PocketMaze => ParamOverrides { d_cam_max: Some(100.0), ..ParamOverrides::default() },
            _ => ParamOverrides::default(),
        }
    }

    fn tag(self) -> u64 {
        Profile::ALL.iter().position(|&p| p == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohortOptions {
    /// Target path length bounds in metres, drawn uniformly.
    pub length_range: (f64, f64),
    /// Stored on every scenario and used for the start check.
    pub params: ParamOverrides,
}

impl Default for CohortOptions {
    fn default() -> Self {
        CohortOptions { length_range: (150.0, 400.0), params: ParamOverrides::default() }
    }
}

struct Draw(SplitMix64);

impl Draw {
    fn new(seed: u64) -> Self {
        Draw(SplitMix64::seed_from_u64(seed))
    }

    fn u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn unit(&mut self) -> f64 {
        (self.u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn below(&mut self, n: u64) -> u64 {
        self.u64() % n
    }

    fn sign(&mut self) -> f64 {
        if self.u64() & 1 == 0 { 1.0 } else { -1.0 }
    }
}

/// Per-scenario seeds for a cohort.
pub fn scenario_seeds(seed: u64, n: usize, profile: Profile) -> Vec<u64> {
    let mut master = Draw::new(seed ^ profile.tag().wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..n).map(|_| master.u64()).collect()
}

pub fn generate_synthetic_cohort(
    seed: u64,
    n: usize,
    profile: Profile,
    opts: &CohortOptions,
) -> Result<Vec<Scenario>, ScenarioError> {
    scenario_seeds(seed, n, profile)
        .into_iter()
        .enumerate()
        .map(|(i, s)| generate_scenario(profile, i, s, opts))
        .collect()
}

pub fn scenario_id(profile: Profile, index: usize) -> String {
    format!("{}.{:04}", profile.name(), index)
}

/// One scenario from its own seed.
pub fn generate_scenario(profile: Profile, index: usize, seed: u64, opts: &CohortOptions) -> Result<Scenario, ScenarioError> {
    let mut rng = Draw::new(seed);
    let (lo, hi) = opts.length_range;
    let length = rng.range(lo.min(hi), lo.max(hi));
    let steps = (round(length / STEP) as usize).max(1);
    let (path, obstacles) = match profile {
        Profile::Open => (walk(&mut rng, steps, Style::Free), Vec::new()),
        Profile::UrbanSparse => {
            let path = walk(&mut rng, steps, Style::Grid);
            let obs = buildings(&mut rng, &path, 1.0 / 1500.0, (4.0, 10.0), (6.0, 25.0));
            (path, obs)
        }
        Profile::UrbanDense => {
            let path = walk(&mut rng, steps, Style::Grid);
            let obs = buildings(&mut rng, &path, 1.0 / 350.0, (5.0, 14.0), (10.0, 50.0));
            (path, obs)
        }
        Profile::Canyon => {
            let path = walk(&mut rng, steps, Style::Grid);
            let obs = canyon(&mut rng, &path);
            (path, obs)
        }
        Profile::VegetationLike => {
            let path = walk(&mut rng, steps, Style::Free);
            let obs = vegetation(&mut rng, &path);
            (path, obs)
        }
        Profile::Highway => {
            let path = walk(&mut rng, steps, Style::Gentle);
            let obs = highway(&mut rng, &path);
            (path, obs)
        }
        Profile::PocketMaze => pocket_maze(&mut rng, steps),
        Profile::OcclusionPocket => {
            let path = walk(&mut rng, steps, Style::Free);
            let obs = screens(&mut rng, &path);
            (path, obs)
        }
    };
    let target = TargetTrajectory::new(path, DT)?;
    let params = opts.params.or(&profile.params());
    let cfg = PlannerConfig::default().with_overrides(&params);
    let start = find_start(&target, &obstacles, &cfg)?;
    Ok(Scenario { id: scenario_id(profile, index), seed, target, obstacles, start, params })
}

#[derive(Clone, Copy)]
enum Style {
    /// Turns up to ±50° every 30-90 m.
    Free,
    /// Straight runs of 40-100 m joined by right-angle turns.
    Grid,
    /// Turns up to ±15° every 60-150 m.
    Gentle,
}

fn step(heading: f64) -> Vec3 {
    Vec3::new(STEP * cos(heading), STEP * sin(heading), 0.0)
}

/// Appends `n` steps at `heading`.
fn extend(path: &mut Vec<Vec3>, heading: f64, n: usize) {
    let d = step(heading);
    for _ in 0..n {
        let last = *path.last().unwrap();
        path.push(last + d);
    }
}

fn walk_from(rng: &mut Draw, path: &mut Vec<Vec3>, mut heading: f64, steps: usize, style: Style) -> f64 {
    let mut left = steps;
    while left > 0 {
        let (lo, hi) = match style {
            Style::Free => (30.0, 90.0),
            Style::Grid => (40.0, 100.0),
            Style::Gentle => (60.0, 150.0),
        };
        let n = ((round(rng.range(lo, hi) / STEP) as usize).max(1)).min(left);
        extend(path, heading, n);
        left -= n;
        heading += match style {
            Style::Free => rng.range(-50.0, 50.0) * PI / 180.0,
            Style::Grid => [0.0, PI / 2.0, -PI / 2.0][rng.below(3) as usize],
            Style::Gentle => rng.range(-15.0, 15.0) * PI / 180.0,
        };
    }
    heading
}

fn walk(rng: &mut Draw, steps: usize, style: Style) -> Vec<Vec3> {
    let heading = rng.range(-PI, PI);
    let mut path = vec![Vec3::ZERO];
    walk_from(rng, &mut path, heading, steps, style);
    path
}

/// Smallest distance from any target waypoint to the raw box.
fn target_distance(b: &ObstacleBox, path: &[Vec3]) -> f64 {
    let f = b.frame();
    path.iter().map(|&p| f.distance(b.half_extents, p)).fold(f64::INFINITY, f64::min)
}

/// Nominal start: the desired viewpoint at layer 0.
fn nominal_start(path: &[Vec3]) -> Vec3 {
    let t = TargetTrajectory { waypoints: path.to_vec(), dt: DT };
    let h = target_headings(&t, PlannerConfig::default().heading_eps)[0];
    desired_viewpoint(path[0], h, &PlannerConfig::default())
}

/// Accepts a box if it keeps `margin` from every target waypoint and leaves
/// the area around the nominal start free.
fn accept(b: &ObstacleBox, path: &[Vec3], margin: f64, keep_out: Vec3) -> bool {
    let f = b.frame();
    let near_start = f.distance(b.half_extents, Vec3::new(keep_out.x, keep_out.y, b.center.z)) < 6.0;
    !near_start && target_distance(b, path) >= margin
}

fn path_bounds(path: &[Vec3], pad: f64) -> Aabb {
    let mut bb = Aabb::EMPTY;
    for &p in path {
        bb = bb.grow(p);
    }
    Aabb { min: bb.min - Vec3::new(pad, pad, 0.0), max: bb.max + Vec3::new(pad, pad, 0.0) }
}

fn boxed(center: Vec3, half: Vec3, yaw: f64, class: &str) -> ObstacleBox {
    ObstacleBox::new(center, half, yaw, class).expect("generator boxes are valid")
}

fn buildings(rng: &mut Draw, path: &[Vec3], density: f64, half: (f64, f64), height: (f64, f64)) -> Vec<ObstacleBox> {
    let bb = path_bounds(path, 55.0);
    let e = bb.extent();
    let n = round(e.x * e.y * density) as usize;
    let keep_out = nominal_start(path);
    let mut out = Vec::new();
    for _ in 0..n {
        let c = Vec3::new(rng.range(bb.min.x, bb.max.x), rng.range(bb.min.y, bb.max.y), 0.0);
        let h = Vec3::new(rng.range(half.0, half.1), rng.range(half.0, half.1), 0.5 * rng.range(height.0, height.1));
        let yaw = rng.range(-PI, PI);
        let b = boxed(Vec3::new(c.x, c.y, h.z), h, yaw, "Building");
        // skip boxes that cannot reach the corridor
        if polyline_distance_xy(c, path) > 45.0 + 5.0 + h.x.max(h.y) * 1.5 {
            continue;
        }
        if accept(&b, path, 3.0, keep_out) {
            out.push(b);
        }
    }
    out
}

/// Segment runs of a piecewise-linear path: (start index, end index, heading).
fn runs(path: &[Vec3]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < path.len() {
        let d = path[i + 1] - path[i];
        let mut j = i + 1;
        while j + 1 < path.len() && (path[j + 1] - path[j] - d).norm() < 1e-9 {
            j += 1;
        }
        out.push((i, j, atan2(d.y, d.x)));
        i = j;
    }
    out
}

fn canyon(rng: &mut Draw, path: &[Vec3]) -> Vec<ObstacleBox> {
    let keep_out = nominal_start(path);
    let mut out = Vec::new();
    for (i, j, heading) in runs(path) {
        let u = Vec3::new(cos(heading), sin(heading), 0.0);
        let n = Vec3::new(-u.y, u.x, 0.0);
        let len = path[i].distance(path[j]);
        for side in [1.0, -1.0] {
            let mut s = rng.range(0.0, 6.0);
            while s < len {
                let l = rng.range(15.0, 35.0);
                let depth = rng.range(4.0, 10.0);
                let lateral = rng.range(9.0, 13.0) + depth;
                let h = rng.range(20.0, 45.0);
                let c = path[i] + u * (s + 0.5 * l) + n * (side * lateral);
                let b = boxed(Vec3::new(c.x, c.y, 0.5 * h), Vec3::new(0.5 * l, depth, 0.5 * h), heading, "Building");
                if accept(&b, path, 3.0, keep_out) {
                    out.push(b);
                }
                s += l + rng.range(1.0, 6.0);
            }
        }
    }
    out
}

/// Canopy tiles on a 9 m pitch covering everything within 52 m of the path,
/// bottoms in [2.6, 3.2] m and tops in [11, 16] m, plus trunks under it.
fn vegetation(rng: &mut Draw, path: &[Vec3]) -> Vec<ObstacleBox> {
    const PITCH: f64 = 9.0;
    let bb = path_bounds(path, 52.0 + PITCH);
    let (nx, ny) = ((bb.extent().x / PITCH) as i64 + 1, (bb.extent().y / PITCH) as i64 + 1);
    let mut out = Vec::new();
    for iy in 0..=ny {
        for ix in 0..=nx {
            let c = Vec3::new(bb.min.x + ix as f64 * PITCH, bb.min.y + iy as f64 * PITCH, 0.0);
            if polyline_distance_xy(c, path) > 52.0 + PITCH {
                continue;
            }
            let c = c + Vec3::new(rng.range(-0.4, 0.4), rng.range(-0.4, 0.4), 0.0);
            let (bottom, top) = (rng.range(2.6, 3.2), rng.range(11.0, 16.0));
            let b = boxed(Vec3::new(c.x, c.y, 0.5 * (bottom + top)), Vec3::new(5.0, 5.0, 0.5 * (top - bottom)), 0.0, "Vegetation");
            out.push(b);
        }
    }
    let keep_out = nominal_start(path);
    let trunks = (path.len() / 6).max(1);
    for _ in 0..trunks {
        let k = rng.below(path.len() as u64) as usize;
        let lateral = rng.sign() * rng.range(2.5, 40.0);
        let a = rng.range(-PI, PI);
        let c = path[k] + Vec3::new(lateral * cos(a), lateral * sin(a), 0.0);
        let top = rng.range(6.0, 11.0);
        let r = rng.range(0.15, 0.35);
        let b = boxed(Vec3::new(c.x, c.y, 0.5 * (top - 1.0)), Vec3::new(r, r, 0.5 * (top + 1.0)), 0.0, "Pole");
        if accept(&b, path, 1.5, keep_out) {
            out.push(b);
        }
    }
    out
}

fn highway(rng: &mut Draw, path: &[Vec3]) -> Vec<ObstacleBox> {
    let keep_out = nominal_start(path);
    let mut out = Vec::new();
    let hs = target_headings(&TargetTrajectory { waypoints: path.to_vec(), dt: DT }, 0.05);
    let mut k = rng.below(40) as usize;
    while k < path.len() {
        let u = hs[k];
        let n = Vec3::new(-u.y, u.x, 0.0);
        let yaw = atan2(u.y, u.x);
        for side in [1.0, -1.0] {
            let c = path[k] + n * (side * rng.range(7.0, 9.0));
            let b = boxed(Vec3::new(c.x, c.y, 4.5), Vec3::new(0.15, 0.15, 5.5), yaw, "Pole");
            if accept(&b, path, 1.5, keep_out) {
                out.push(b);
            }
        }
        if rng.below(4) == 0 {
            let b = boxed(path[k] + Vec3::new(0.0, 0.0, 6.5), Vec3::new(0.4, 12.0, 0.5), yaw, "Gantry");
            if accept(&b, path, 1.5, keep_out) {
                out.push(b);
            }
        }
        k += 36 + rng.below(22) as usize;
    }
    out.extend(
        buildings(rng, path, 1.0 / 3000.0, (6.0, 14.0), (8.0, 30.0))
            .into_iter()
            .filter(|b| target_distance(b, path) >= 20.0),
    );
    out
}

/// Thin poles beside the path and thin horizontal slats over it: occluders
/// only a few body rays see, placed among a few low buildings.
fn screens(rng: &mut Draw, path: &[Vec3]) -> Vec<ObstacleBox> {
    let keep_out = nominal_start(path);
    let mut out = buildings(rng, path, 1.0 / 2500.0, (4.0, 9.0), (6.0, 20.0))
        .into_iter()
        .filter(|b| target_distance(b, path) >= 6.0)
        .collect::<Vec<_>>();
    let length = path.len() as f64 * STEP;
    let n = (length * 0.8) as usize + 4;
    for _ in 0..n {
        let k = rng.below(path.len() as u64) as usize;
        let a = rng.range(-PI, PI);
        if rng.below(2) == 0 {
            let r = rng.range(2.5, 14.0);
            let c = path[k] + Vec3::new(r * cos(a), r * sin(a), 0.0);
            let top = rng.range(4.0, 14.0);
            let w = rng.range(0.08, 0.15);
            let b = boxed(Vec3::new(c.x, c.y, 0.5 * (top - 1.0)), Vec3::new(w, w, 0.5 * (top + 1.0)), 0.0, "Pole");
            if accept(&b, path, 1.5, keep_out) {
                out.push(b);
            }
        } else {
            let r = rng.range(0.0, 10.0);
            let c = path[k] + Vec3::new(r * cos(a), r * sin(a), rng.range(1.8, 9.0));
            let half = Vec3::new(rng.range(1.0, 3.0), rng.range(0.3, 1.2), rng.range(0.05, 0.1));
            let b = boxed(c, half, rng.range(-PI, PI), "Slat");
            if accept(&b, path, 1.5, keep_out) {
                out.push(b);
            }
        }
    }
    out
}

/// A target path that ends inside a roofed, bent tunnel, among dense
/// buildings. After the bend no tracker pose can see the target.
fn pocket_maze(rng: &mut Draw, steps: usize) -> (Vec<Vec3>, Vec<ObstacleBox>) {
    let la = ((steps as f64 * 0.2) as usize).max(15);
    let lb = ((steps as f64 * 0.3) as usize).max(15);
    let prefix = steps.saturating_sub(la + lb).max(1);
    for _ in 0..64 {
        let mut path = vec![Vec3::ZERO];
        let h0 = rng.range(-PI, PI);
        walk_from(rng, &mut path, h0, prefix, Style::Grid);
        // the tunnel continues the last run
        let d = path[path.len() - 1] - path[path.len() - 2];
        let h1 = atan2(d.y, d.x);
        let mouth = *path.last().unwrap();
        extend(&mut path, h1, la);
        let corner = *path.last().unwrap();
        let turn = rng.sign();
        extend(&mut path, h1 + turn * PI / 2.0, lb);
        let tunnel = tunnel_boxes(mouth, corner, h1, turn, lb as f64 * STEP + 8.0);
        let entry = path.len() - la - lb - 1;
        let clear = tunnel.iter().all(|b| target_distance(b, &path[..entry]) >= 1.5)
            && tunnel.iter().all(|b| target_distance(b, &path[entry..]) >= 1.5);
        if !clear {
            continue;
        }
        let mut zone = Aabb::EMPTY;
        for b in &tunnel {
            zone = zone.union(b.aabb(3.0));
        }
        let mut obs = buildings(rng, &path, 1.0 / 450.0, (4.0, 12.0), (10.0, 40.0));
        obs.retain(|b| {
            let a = b.aabb(0.0);
            a.max.x < zone.min.x || a.min.x > zone.max.x || a.max.y < zone.min.y || a.min.y > zone.max.y
        });
        obs.extend(tunnel);
        return (path, obs);
    }
    panic!("pocket-maze generation exhausted its retries");
}

/// Walls at ±2 m, a roof from 2 to 3 m and an end cap. The tunnel runs from
/// `mouth` to `corner` along `h1`, then turns by `turn * 90°` for `len_b` m.
fn tunnel_boxes(mouth: Vec3, corner: Vec3, h1: f64, turn: f64, len_b: f64) -> Vec<ObstacleBox> {
    let u = Vec3::new(cos(h1), sin(h1), 0.0);
    let n = Vec3::new(-u.y, u.x, 0.0) * turn;
    let la = mouth.distance(corner);
    // boxes in (along, toward-turn) coordinates around the corner
    let part = |u0: f64, u1: f64, v0: f64, v1: f64, z0: f64, z1: f64, class: &str| {
        let c = corner + u * (0.5 * (u0 + u1)) + n * (0.5 * (v0 + v1));
        boxed(Vec3::new(c.x, c.y, 0.5 * (z0 + z1)), Vec3::new(0.5 * (u1 - u0), 0.5 * (v1 - v0), 0.5 * (z1 - z0)), h1, class)
    };
    let end = len_b + 0.6;
    vec![
        part(-la, -1.7, 1.7, 2.3, -1.0, 2.5, "Wall"),
        part(-la, 2.3, -2.3, -1.7, -1.0, 2.5, "Wall"),
        part(-2.3, -1.7, 1.7, end, -1.0, 2.5, "Wall"),
        part(1.7, 2.3, -2.3, end, -1.0, 2.5, "Wall"),
        part(-2.3, 2.3, len_b, end, -1.0, 2.5, "Wall"),
        part(-la, 2.3, -2.3, 2.3, 2.0, 3.0, "Roof"),
        part(-2.3, 2.3, 2.3, end, 2.0, 3.0, "Roof"),
    ]
}

/// The nominal start, or the nearest feasible voxel centre within
/// [`START_SEARCH_RADIUS`] voxels of it.
pub fn find_start(target: &TargetTrajectory, obstacles: &[ObstacleBox], cfg: &PlannerConfig) -> Result<Vec3, ScenarioError> {
    let path = &target.waypoints;
    let h = target_headings(target, cfg.heading_eps)[0];
    let q0 = desired_viewpoint(path[0], h, cfg);
    let grid = cfg.grid();
    let bvh = Bvh::build(obstacles, cfg.d_safe).map_err(ScenarioError::Obstacle)?;
    let corridor = Corridor::build(path, obstacles, &grid, cfg.corridor_half_width, cfg.d_influence);
    let ok = |v: VoxelIndex| {
        let c = grid.center(v);
        corridor.admits(v) && in_altitude_and_range(c, path[0], cfg) && bvh.distance(c) >= cfg.d_safe
    };
    let v0 = grid.snap(q0);
    if ok(v0) {
        return Ok(q0);
    }
    let r = START_SEARCH_RADIUS;
    let mut best: Option<(f64, VoxelIndex)> = None;
    for dx in -r..=r {
        for dy in -r..=r {
            for dz in -r..=r {
                let v = v0.offset(VoxelIndex::new(dx, dy, dz));
                let d = grid.center(v).distance(q0);
                let better = match best {
                    None => true,
                    Some((bd, bv)) => d < bd || (d == bd && v < bv),
                };
                if better && ok(v) {
                    best = Some((d, v));
                }
            }
        }
    }
    best.map(|(_, v)| grid.center(v)).ok_or(ScenarioError::NoFeasibleStart)
}
