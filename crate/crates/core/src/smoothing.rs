//! Optional greedy shortcut pass over a converged trajectory.
//!
//! From each anchor `i` the pass finds the farthest `j` such that straight
//! interpolation between `s_i` and `s_j` keeps every intermediate state
//! feasible and every step within `v_max * dt`, then replaces the states in
//! between. The layer count is unchanged. Off by default.

use alloc::vec::Vec;

use crate::bvh::Bvh;
use crate::config::PlannerConfig;
use crate::geometry::Vec3;
use crate::objective::is_feasible_state;
use crate::scenario::Scenario;

fn lerp(a: Vec3, b: Vec3, f: f64) -> Vec3 {
    a + (b - a) * f
}

fn shortcut_ok(traj: &[Vec3], i: usize, j: usize, targets: &[Vec3], bvh: &Bvh, cfg: &PlannerConfig) -> bool {
    let (a, b) = (traj[i], traj[j]);
    let n = (j - i) as f64;
    if a.distance(b) / n > cfg.max_step() {
        return false;
    }
    (i + 1..j).all(|k| is_feasible_state(lerp(a, b, (k - i) as f64 / n), targets[k], bvh, cfg))
}

pub fn shortcut(traj: &[Vec3], scenario: &Scenario, bvh: &Bvh, cfg: &PlannerConfig) -> Vec<Vec3> {
    let targets = &scenario.target.waypoints;
    let mut out = traj.to_vec();
    if out.len() < 3 || targets.len() != out.len() {
        return out;
    }
    let mut i = 0;
    while i + 1 < out.len() {
        let mut j = out.len() - 1;
        while j > i + 1 && !shortcut_ok(&out, i, j, targets, bvh, cfg) {
            j -= 1;
        }
        let (a, b) = (out[i], out[j]);
        let n = (j - i) as f64;
        for k in i + 1..j {
            out[k] = lerp(a, b, (k - i) as f64 / n);
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ParamOverrides;
    use crate::scenario::TargetTrajectory;
    use alloc::vec;

    #[test]
    fn zigzag_straightens_in_open_world() {
        let cfg = PlannerConfig::default();
        let targets: Vec<Vec3> = (0..5).map(|i| Vec3::new(20.0 + i as f64 * 0.7, 0.0, 0.0)).collect();
        let s = Scenario {
            id: "t.0".into(),
            seed: 0,
            target: TargetTrajectory::new(targets, 0.5).unwrap(),
            obstacles: vec![],
            start: Vec3::new(0.0, 0.0, 22.0),
            params: ParamOverrides::default(),
        };
        let bvh = Bvh::build(&[], 1.5).unwrap();
        let z = |x: f64, y: f64| Vec3::new(x, y, 22.0);
        let traj = vec![z(0.0, 0.0), z(0.0, 4.0), z(0.0, 0.0), z(0.0, 4.0), z(0.0, 0.0)];
        let out = shortcut(&traj, &s, &bvh, &cfg);
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|p| *p == z(0.0, 0.0)));
    }
}
