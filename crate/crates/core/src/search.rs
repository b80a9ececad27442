//! Pieces shared by both planners: results, errors, neighbour offsets, the
//! per-scenario planning context and the cross-time distance cache.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bvh::Bvh;
use crate::config::PlannerConfig;
use crate::corridor::Corridor;
use crate::geometry::Vec3;
use crate::grid::{GridSpec, VoxelDomain, VoxelIndex};
use crate::objective::{desired_viewpoint, in_altitude_and_range, target_headings, RaySet};
use crate::scenario::{Scenario, ScenarioError};

#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    /// `T + 1` states when converged, otherwise just the snapped start.
    pub trajectory: Vec<Vec3>,
    pub converged: bool,
    pub expansions: u64,
    /// Seconds spent in the planner. Left at 0 here; the std harness times calls.
    pub runtime: f64,
    /// Accumulated cost of the returned trajectory; 0 for fallbacks.
    pub total_cost: f64,
    /// Layered planner: frontier size per layer after pruning. Baseline:
    /// number of closed nodes per layer.
    pub per_layer_frontier_sizes: Vec<usize>,
    /// Largest frontier seen before pruning (layered planner only).
    pub max_unpruned_frontier: usize,
}

impl PlanResult {
    pub(crate) fn fallback(start: Vec3, expansions: u64, sizes: Vec<usize>, max_unpruned: usize) -> PlanResult {
        PlanResult {
            trajectory: vec![start],
            converged: false,
            expansions,
            runtime: 0.0,
            total_cost: 0.0,
            per_layer_frontier_sizes: sizes,
            max_unpruned_frontier: max_unpruned,
        }
    }

    pub fn is_fallback(&self) -> bool {
        !self.converged
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlanError {
    /// The snapped start violates the state constraints at layer 0.
    InfeasibleStart { voxel: VoxelIndex, clearance: f64 },
    InvalidConfig,
    Scenario(ScenarioError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::InfeasibleStart { voxel, clearance } => write!(
                f,
                "start voxel ({}, {}, {}) is infeasible (clearance {clearance:.3} m)",
                voxel.ix, voxel.iy, voxel.iz
            ),
            PlanError::InvalidConfig => write!(f, "invalid planner configuration"),
            PlanError::Scenario(e) => write!(f, "invalid scenario: {e}"),
        }
    }
}

impl core::error::Error for PlanError {}

impl From<ScenarioError> for PlanError {
    fn from(e: ScenarioError) -> Self {
        PlanError::Scenario(e)
    }
}

/// Every offset of the 27-cell neighbourhood whose metric length is within
/// `v_max * dt`, in lexicographic `(dx, dy, dz)` order.
pub fn neighbor_offsets(cfg: &PlannerConfig) -> Vec<VoxelIndex> {
    let step = cfg.max_step();
    let mut out = Vec::new();
    for dx in -1..=1 {
        for dy in -1..=1 {
            for dz in -1..=1 {
                let m = Vec3::new(dx as f64 * cfg.dxy, dy as f64 * cfg.dxy, dz as f64 * cfg.dz);
                if m.norm() <= step {
                    out.push(VoxelIndex::new(dx, dy, dz));
                }
            }
        }
    }
    out
}

/// Static obstacle distance memoized per voxel, valid for every layer.
pub struct DistanceCache {
    domain: VoxelDomain,
    values: Vec<f64>,
}

impl DistanceCache {
    pub fn new(domain: VoxelDomain) -> Self {
        DistanceCache { domain, values: vec![f64::NAN; domain.volume()] }
    }

    #[inline]
    pub fn get(&mut self, v: VoxelIndex, grid: &GridSpec, bvh: &Bvh) -> f64 {
        match self.domain.linear(v) {
            Some(i) => {
                let d = self.values[i];
                if d.is_nan() {
                    let d = bvh.distance(grid.center(v));
                    self.values[i] = d;
                    d
                } else {
                    d
                }
            }
            None => bvh.distance(grid.center(v)),
        }
    }

    pub fn filled(&self) -> usize {
        self.values.iter().filter(|d| !d.is_nan()).count()
    }
}

/// Obstacle-distance lookup through the cache or straight to the BVH.
///
/// The direct path asks only for `min(d, limit)` with `limit >= d_I, d_safe`:
/// neither the clearance test nor the safety term can tell the difference.
pub(crate) enum Distances {
    Cached(DistanceCache),
    Direct { limit: f64 },
}

impl Distances {
    #[inline]
    pub(crate) fn get(&mut self, v: VoxelIndex, grid: &GridSpec, bvh: &Bvh) -> f64 {
        match self {
            Distances::Cached(c) => c.get(v, grid, bvh),
            Distances::Direct { limit } => bvh.distance_within(grid.center(v), *limit),
        }
    }
}

/// Everything derived from `(scenario, cfg)` before the search starts.
pub struct PlanContext<'a> {
    pub scenario: &'a Scenario,
    pub bvh: &'a Bvh,
    pub cfg: PlannerConfig,
    pub grid: GridSpec,
    pub corridor: Corridor,
    /// Desired viewpoint per layer.
    pub viewpoints: Vec<Vec3>,
    pub rays: RaySet,
    pub offsets: Vec<VoxelIndex>,
    pub start: VoxelIndex,
}

impl<'a> PlanContext<'a> {
    /// Applies the scenario's overrides to `cfg`, validates inputs and checks
    /// the snapped start. `bvh` should be inflated by the effective `d_safe`.
    pub fn new(scenario: &'a Scenario, bvh: &'a Bvh, cfg: &PlannerConfig) -> Result<Self, PlanError> {
        let cfg = &cfg.with_overrides(&scenario.params);
        if !cfg.is_valid() {
            return Err(PlanError::InvalidConfig);
        }
        scenario.validate()?;
        let grid = cfg.grid();
        let path = &scenario.target.waypoints;
        let corridor = Corridor::build(path, &scenario.obstacles, &grid, cfg.corridor_half_width, cfg.d_influence);
        let viewpoints = target_headings(&scenario.target, cfg.heading_eps)
            .into_iter()
            .zip(path)
            .map(|(h, &p)| desired_viewpoint(p, h, cfg))
            .collect();
        let start = grid.snap(scenario.start);
        let clearance = bvh.distance(grid.center(start));
        let ctx = PlanContext {
            scenario,
            bvh,
            cfg: *cfg,
            grid,
            corridor,
            viewpoints,
            rays: RaySet::subset(cfg.ray_count),
            offsets: neighbor_offsets(cfg),
            start,
        };
        if !ctx.gate(start, 0) || clearance < cfg.d_safe {
            return Err(PlanError::InfeasibleStart { voxel: start, clearance });
        }
        Ok(ctx)
    }

    pub fn horizon(&self) -> usize {
        self.scenario.target.horizon()
    }

    pub fn target(&self, t: usize) -> Vec3 {
        self.scenario.target.waypoints[t]
    }

    /// Corridor, altitude band and camera range (everything but clearance).
    #[inline]
    pub fn gate(&self, v: VoxelIndex, t: usize) -> bool {
        self.corridor.admits(v) && in_altitude_and_range(self.grid.center(v), self.target(t), &self.cfg)
    }

    pub(crate) fn distances(&self) -> Distances {
        if self.cfg.use_cache {
            Distances::Cached(DistanceCache::new(self.corridor.domain()))
        } else {
            Distances::Direct { limit: self.cfg.d_influence.max(self.cfg.d_safe) }
        }
    }

    pub fn snapped_start(&self) -> Vec3 {
        self.grid.center(self.start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbor_counts() {
        let c = PlannerConfig::default();
        let n = neighbor_offsets(&c);
        assert_eq!(n.len(), 7);
        assert!(n.contains(&VoxelIndex::new(0, 0, 0)));
        assert!(n.windows(2).all(|w| w[0] < w[1]));
        // faces and planar diagonals, no corners (4√2 ≤ 6.5 < 4√3)
        assert_eq!(neighbor_offsets(&PlannerConfig { v_max: 13.0, ..c }).len(), 19);
        // 4√3 ≈ 6.93 fits in a 7 m step, so corners are included
        assert_eq!(neighbor_offsets(&PlannerConfig { v_max: 14.0, ..c }).len(), 27);
        assert_eq!(neighbor_offsets(&PlannerConfig { v_max: 7.8, ..c }).len(), 1);
    }

    #[test]
    fn cache_matches_bvh() {
        use crate::geometry::ObstacleBox;
        let b = ObstacleBox::axis_aligned(Vec3::new(3.0, 1.0, 10.0), Vec3::new(2.0, 2.0, 8.0), "x").unwrap();
        let bvh = Bvh::build(&[b], 1.5).unwrap();
        let grid = PlannerConfig::default().grid();
        let dom = VoxelDomain { min: VoxelIndex::new(-3, -3, 0), max: VoxelIndex::new(3, 3, 4) };
        let mut c = DistanceCache::new(dom);
        for _ in 0..2 {
            for ix in -4..=4 {
                for iz in -1..=5 {
                    let v = VoxelIndex::new(ix, 1, iz);
                    assert_eq!(c.get(v, &grid, &bvh).to_bits(), bvh.distance(grid.center(v)).to_bits());
                }
            }
        }
        assert_eq!(c.filled(), 7 * 5);
    }
}
