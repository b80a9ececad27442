//! Visibility-aware offline trajectory planning for active target tracking.
//!
//! The crate is `no_std` (it needs `alloc`). It holds every algorithmic
//! piece: oriented-box geometry and the BVH, voxel grids and the search
//! corridor, the tracking objective, the layered-DAG beam planner, the
//! priority-queue baseline, trajectory replay metrics and the seeded
//! synthetic scenario generator. File formats, timing and the CLI live in
//! the `tastar` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod bvh;
pub mod config;
pub mod corridor;
pub mod generator;
pub mod geometry;
pub mod grid;
pub mod metrics;
pub mod objective;
pub mod scenario;
pub mod search;
pub mod smoothing;
pub mod ta_star;

pub use bvh::Bvh;
pub use config::{BeamWidth, CostWeights, ParamOverrides, PlannerConfig, RayCount, SearchStructure};
pub use corridor::Corridor;
pub use geometry::{Aabb, GeometryError, ObstacleBox, Vec3};
pub use grid::{GridSpec, VoxelIndex};
pub use metrics::{CohortEntry, CohortSummary, Comparison, DeltaReport, EvalReport, ReplayError};
pub use objective::{CostTerms, RaySet};
pub use scenario::{Scenario, ScenarioError, TargetTrajectory};
pub use search::{neighbor_offsets, PlanError, PlanResult};
pub use generator::{generate_synthetic_cohort, CohortOptions, Profile};

/// Plans with whichever search structure `cfg` selects.
/// Scenario overrides are applied on top of `cfg`; `bvh` must be inflated by
/// the resulting `d_safe`. The shortcut pass runs only when enabled.
pub fn plan(scenario: &Scenario, bvh: &Bvh, cfg: &PlannerConfig) -> Result<PlanResult, PlanError> {
    let mut r = match cfg.structure {
        SearchStructure::LayeredDag => ta_star::plan(scenario, bvh, cfg),
        SearchStructure::PriorityQueue => baseline::plan_baseline(scenario, bvh, cfg),
    }?;
    let eff = cfg.with_overrides(&scenario.params);
    if eff.post_smoothing && r.converged {
        r.trajectory = smoothing::shortcut(&r.trajectory, scenario, bvh, &eff);
    }
    Ok(r)
}

/// `cfg` with the scenario's overrides applied.
pub fn effective_config(scenario: &Scenario, cfg: &PlannerConfig) -> PlannerConfig {
    cfg.with_overrides(&scenario.params)
}
