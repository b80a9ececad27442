//! Planner parameters. Defaults are the production weights and parameters.

use crate::geometry::Vec3;
use crate::grid::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostWeights {
    /// Euclidean step length.
    pub path: f64,
    /// Deviation from the desired viewpoint.
    pub tracking: f64,
    /// Occlusion penalty `1 - V`.
    pub visibility: f64,
    /// Quadratic obstacle-proximity penalty.
    pub safety: f64,
    /// Vertical smoothness `|Δz|`.
    pub smoothness: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { path: 1.0, tracking: 2.0, visibility: 18.0, safety: 8.0, smoothness: 0.15 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamWidth {
    Finite(usize),
    Unbounded,
}

impl BeamWidth {
    pub fn limit(self) -> usize {
        match self {
            BeamWidth::Finite(b) => b,
            BeamWidth::Unbounded => usize::MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayCount {
    One,
    Three,
    Five,
}

impl RayCount {
    pub fn from_count(n: u32) -> Option<RayCount> {
        match n {
            1 => Some(RayCount::One),
            3 => Some(RayCount::Three),
            5 => Some(RayCount::Five),
            _ => None,
        }
    }

    pub fn count(self) -> usize {
        match self {
            RayCount::One => 1,
            RayCount::Three => 3,
            RayCount::Five => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStructure {
    /// Binary-heap best-first search over `(voxel, t)` nodes.
    PriorityQueue,
    /// Layer-synchronous relaxation with per-layer top-B pruning.
    LayeredDag,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig {
    pub weights: CostWeights,
    /// Seconds per layer.
    pub dt: f64,
    pub dxy: f64,
    pub dz: f64,
    pub d_behind: f64,
    pub z_ref: f64,
    /// Influence distance of the safety term.
    pub d_influence: f64,
    /// Hard clearance; also the inflation applied to obstacle boxes.
    pub d_safe: f64,
    pub d_cam_min: f64,
    pub d_cam_max: f64,
    pub v_max: f64,
    /// Hard visibility floor; 0 disables it.
    pub v_min: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub corridor_half_width: f64,
    /// Target speeds below this (m/s) count as stationary for the heading.
    pub heading_eps: f64,
    pub beam_width: BeamWidth,
    pub ray_count: RayCount,
    pub use_cache: bool,
    pub structure: SearchStructure,
    /// Budget of neighbour evaluations; exceeding it yields the 1-point fallback.
    pub expansion_cap: u64,
    pub post_smoothing: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            weights: CostWeights::default(),
            dt: 0.5,
            dxy: 4.0,
            dz: 4.0,
            d_behind: 20.0,
            z_ref: 22.0,
            d_influence: 5.0,
            d_safe: 1.5,
            d_cam_min: 3.0,
            d_cam_max: 50.0,
            v_max: 10.0,
            v_min: 0.0,
            z_min: 2.0,
            z_max: 60.0,
            corridor_half_width: 45.0,
            heading_eps: 0.05,
            beam_width: BeamWidth::Finite(2048),
            ray_count: RayCount::Five,
            use_cache: true,
            structure: SearchStructure::LayeredDag,
            expansion_cap: 5_000_000,
            post_smoothing: false,
        }
    }
}

impl PlannerConfig {
    /// Voxel grid: horizontal origin at the world origin, vertical origin at `z_min`.
    pub fn grid(&self) -> GridSpec {
        GridSpec { origin: Vec3::new(0.0, 0.0, self.z_min), dxy: self.dxy, dz: self.dz, z_min: self.z_min, z_max: self.z_max }
    }

    pub fn max_step(&self) -> f64 {
        self.v_max * self.dt
    }

    pub fn is_valid(&self) -> bool {
        let w = &self.weights;
        [w.path, w.tracking, w.visibility, w.safety, w.smoothness].iter().all(|&x| x >= 0.0 && x.is_finite())
            && self.d_cam_min < self.d_cam_max
            && self.dt > 0.0
            && self.dxy > 0.0
            && self.dz > 0.0
            && self.v_max > 0.0
            && self.d_influence > 0.0
            && self.d_safe >= 0.0
            && (0.0..=1.0).contains(&self.v_min)
            && self.z_min < self.z_max
            && self.corridor_half_width > 0.0
    }

    pub fn with_overrides(mut self, o: &ParamOverrides) -> Self {
        o.apply(&mut self);
        self
    }
}

impl ParamOverrides {
    fn apply(&self, cfg: &mut PlannerConfig) {
        let o = self;
        macro_rules! apply {
            ($($field:ident => $($target:ident).+),* $(,)?) => {
                $(if let Some(v) = o.$field { cfg.$($target).+ = v; })*
            };
        }
        apply!(
            w_path => weights.path,
            w_trk => weights.tracking,
            w_vis => weights.visibility,
            w_safe => weights.safety,
            w_sm => weights.smoothness,
            dt => dt,
            dxy => dxy,
            dz => dz,
            d_behind => d_behind,
            z_ref => z_ref,
            d_i => d_influence,
            d_safe => d_safe,
            d_cam_min => d_cam_min,
            d_cam_max => d_cam_max,
            v_max => v_max,
            v_min => v_min,
            z_min => z_min,
            z_max => z_max,
            corridor_half_width => corridor_half_width,
        );
    }

    /// Field-wise `self`, falling back to `other`.
    pub fn or(&self, other: &ParamOverrides) -> ParamOverrides {
        macro_rules! pick {
            ($($f:ident),*) => { ParamOverrides { $($f: self.$f.or(other.$f)),* } };
        }
        pick!(
            w_path, w_trk, w_vis, w_safe, w_sm, dt, dxy, dz, d_behind, z_ref, d_i, d_safe, d_cam_min, d_cam_max, v_max,
            v_min, z_min, z_max, corridor_half_width
        )
    }

    pub fn is_empty(&self) -> bool {
        *self == ParamOverrides::default()
    }
}

/// Per-scenario parameter overrides. Search-structure choices (beam, rays,
/// cache, cap) are not overridable per scenario: they define the variant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ParamOverrides {
    pub w_path: Option<f64>,
    pub w_trk: Option<f64>,
    pub w_vis: Option<f64>,
    pub w_safe: Option<f64>,
    pub w_sm: Option<f64>,
    pub dt: Option<f64>,
    pub dxy: Option<f64>,
    pub dz: Option<f64>,
    pub d_behind: Option<f64>,
    pub z_ref: Option<f64>,
    pub d_i: Option<f64>,
    pub d_safe: Option<f64>,
    pub d_cam_min: Option<f64>,
    pub d_cam_max: Option<f64>,
    pub v_max: Option<f64>,
    pub v_min: Option<f64>,
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub corridor_half_width: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_production_table() {
        let c = PlannerConfig::default();
        assert_eq!(
            (c.weights.path, c.weights.tracking, c.weights.visibility, c.weights.safety, c.weights.smoothness),
            (1.0, 2.0, 18.0, 8.0, 0.15)
        );
        assert_eq!((c.dt, c.dxy, c.dz, c.d_behind, c.z_ref, c.d_influence, c.d_safe), (0.5, 4.0, 4.0, 20.0, 22.0, 5.0, 1.5));
        assert_eq!((c.d_cam_min, c.d_cam_max, c.v_max, c.v_min), (3.0, 50.0, 10.0, 0.0));
        assert_eq!(c.max_step(), 5.0);
        assert_eq!(c.beam_width, BeamWidth::Finite(2048));
        assert!(c.is_valid());
    }

    #[test]
    fn overrides_apply() {
        let o = ParamOverrides { d_cam_max: Some(16.0), w_vis: Some(0.0), ..Default::default() };
        let c = PlannerConfig::default().with_overrides(&o);
        assert_eq!(c.d_cam_max, 16.0);
        assert_eq!(c.weights.visibility, 0.0);
        assert_eq!(c.d_cam_min, 3.0);
    }
}
