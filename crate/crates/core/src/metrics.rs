//! Trajectory replay, pairwise visibility deltas and cohort aggregates.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bvh::Bvh;
use crate::geometry::Vec3;
use crate::objective::{visibility, RaySet};
use crate::scenario::Scenario;

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub per_frame_visibility: Vec<f64>,
    pub mean_visibility: f64,
    pub path_length: f64,
    pub min_clearance: f64,
    pub collision_free: bool,
    pub v_max_observed: f64,
    pub a_max_observed: f64,
    pub n_frames: usize,
}

impl EvalReport {
    /// A 1-point trajectory has nothing to compare.
    pub fn is_degenerate(&self) -> bool {
        self.n_frames <= 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReplayError {
    Empty,
    /// Neither `T + 1` states nor a 1-point fallback.
    LengthMismatch { trajectory: usize, target: usize },
    NonFinite(usize),
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::Empty => write!(f, "trajectory is empty"),
            ReplayError::LengthMismatch { trajectory, target } => {
                write!(f, "trajectory has {trajectory} states but the target has {target} waypoints")
            }
            ReplayError::NonFinite(i) => write!(f, "trajectory state {i} is not finite"),
        }
    }
}

impl core::error::Error for ReplayError {}

/// Replays `traj` against the scenario with the full five-ray set.
/// `d_safe` decides `collision_free`; `bvh` must carry the same inflation.
pub fn replay(traj: &[Vec3], scenario: &Scenario, bvh: &Bvh, d_safe: f64) -> Result<EvalReport, ReplayError> {
    let targets = &scenario.target.waypoints;
    if traj.is_empty() {
        return Err(ReplayError::Empty);
    }
    if traj.len() != 1 && traj.len() != targets.len() {
        return Err(ReplayError::LengthMismatch { trajectory: traj.len(), target: targets.len() });
    }
    if let Some(i) = traj.iter().position(|s| !s.is_finite()) {
        return Err(ReplayError::NonFinite(i));
    }
    let rays = RaySet::full();
    let dt = scenario.target.dt;
    let per_frame: Vec<f64> = traj.iter().zip(targets).map(|(&s, &p)| visibility(s, p, bvh, &rays)).collect();
    let mean = per_frame.iter().sum::<f64>() / per_frame.len() as f64;
    let min_clearance = traj.iter().map(|&s| bvh.distance(s)).fold(f64::INFINITY, f64::min);
    let path_length = traj.windows(2).map(|w| w[0].distance(w[1])).sum();
    let vel: Vec<Vec3> = traj.windows(2).map(|w| (w[1] - w[0]) * (1.0 / dt)).collect();
    let v_max = vel.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let a_max = vel.windows(2).map(|w| ((w[1] - w[0]) * (1.0 / dt)).norm()).fold(0.0, f64::max);
    Ok(EvalReport {
        n_frames: per_frame.len(),
        per_frame_visibility: per_frame,
        mean_visibility: mean,
        path_length,
        min_clearance,
        collision_free: min_clearance >= d_safe,
        v_max_observed: v_max,
        a_max_observed: a_max,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    /// `100 * (mean_ours - mean_base)`.
    pub delta_pp: f64,
    pub frame_identical: bool,
    pub per_frame_delta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Comparison {
    Delta(DeltaReport),
    Excluded { base_degenerate: bool, ours_degenerate: bool },
}

impl Comparison {
    pub fn delta(&self) -> Option<&DeltaReport> {
        match self {
            Comparison::Delta(d) => Some(d),
            Comparison::Excluded { .. } => None,
        }
    }
}

pub fn compare(base: &EvalReport, ours: &EvalReport) -> Comparison {
    if base.is_degenerate() || ours.is_degenerate() || base.n_frames != ours.n_frames {
        return Comparison::Excluded { base_degenerate: base.is_degenerate(), ours_degenerate: ours.is_degenerate() };
    }
    let b = &base.per_frame_visibility;
    let o = &ours.per_frame_visibility;
    Comparison::Delta(DeltaReport {
        delta_pp: 100.0 * (ours.mean_visibility - base.mean_visibility),
        frame_identical: b.iter().zip(o).all(|(x, y)| x.to_bits() == y.to_bits()),
        per_frame_delta: b.iter().zip(o).map(|(x, y)| 100.0 * (y - x)).collect(),
    })
}

/// One planner run on one scenario, reduced to what the cohort tables need.
#[derive(Clone, Debug, PartialEq)]
pub struct CohortEntry {
    pub scenario_id: String,
    pub profile: String,
    pub converged: bool,
    pub runtime: f64,
    pub expansions: u64,
    pub mean_visibility: f64,
    pub collision_free: bool,
    /// Against the reference planner, when a pairing exists.
    pub comparison: Option<Comparison>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CohortSummary {
    pub n: usize,
    pub converged: usize,
    pub fallbacks: usize,
    pub total_runtime: f64,
    pub mean_runtime: f64,
    pub median_runtime: f64,
    pub p99_runtime: f64,
    pub max_runtime: f64,
    pub mean_expansions: f64,
    /// Over converged runs only.
    pub mean_visibility: Option<f64>,
    /// Same, without the excluded profiles.
    pub mean_visibility_excl: Option<f64>,
    /// Converged runs whose replayed clearance is at least `d_safe`.
    pub collision_free_converged: usize,
    pub compared: usize,
    pub excluded: usize,
    pub frame_identical: usize,
    pub better: usize,
    pub worse: usize,
    pub mean_delta_pp: Option<f64>,
    pub worst_delta_pp: Option<f64>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Nearest-rank percentile of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = libm::ceil(q * sorted.len() as f64) as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

pub fn aggregate_cohort(entries: &[CohortEntry], excluded_profiles: &[&str]) -> CohortSummary {
    let mut rt: Vec<f64> = entries.iter().map(|e| e.runtime).collect();
    rt.sort_by(f64::total_cmp);
    let conv = || entries.iter().filter(|e| e.converged);
    let deltas: Vec<&DeltaReport> = entries.iter().filter_map(|e| e.comparison.as_ref()?.delta()).collect();
    CohortSummary {
        n: entries.len(),
        converged: conv().count(),
        fallbacks: entries.len() - conv().count(),
        total_runtime: rt.iter().sum(),
        mean_runtime: mean(rt.iter().copied()).unwrap_or(0.0),
        median_runtime: median(&rt),
        p99_runtime: percentile(&rt, 0.99),
        max_runtime: rt.last().copied().unwrap_or(0.0),
        mean_expansions: mean(entries.iter().map(|e| e.expansions as f64)).unwrap_or(0.0),
        mean_visibility: mean(conv().map(|e| e.mean_visibility)),
        mean_visibility_excl: mean(
            conv().filter(|e| !excluded_profiles.contains(&e.profile.as_str())).map(|e| e.mean_visibility),
        ),
        collision_free_converged: conv().filter(|e| e.collision_free).count(),
        compared: deltas.len(),
        excluded: entries.iter().filter(|e| matches!(e.comparison, Some(Comparison::Excluded { .. }))).count(),
        frame_identical: deltas.iter().filter(|d| d.frame_identical).count(),
        better: deltas.iter().filter(|d| d.delta_pp > 0.0).count(),
        worse: deltas.iter().filter(|d| d.delta_pp < 0.0).count(),
        mean_delta_pp: mean(deltas.iter().map(|d| d.delta_pp)),
        worst_delta_pp: deltas.iter().map(|d| d.delta_pp).min_by(f64::total_cmp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ParamOverrides;
    use crate::geometry::ObstacleBox;
    use crate::scenario::TargetTrajectory;
    use alloc::string::ToString;
    use alloc::vec;

    fn scenario(n: usize) -> Scenario {
        let targets: Vec<Vec3> = (0..n).map(|i| Vec3::new(20.0 + i as f64 * 0.7, 0.0, 0.0)).collect();
        Scenario {
            id: "open.0000".into(),
            seed: 1,
            target: TargetTrajectory::new(targets, 0.5).unwrap(),
            obstacles: vec![],
            start: Vec3::new(0.0, 0.0, 22.0),
            params: ParamOverrides::default(),
        }
    }

    fn z(x: f64) -> Vec3 {
        Vec3::new(x, 0.0, 22.0)
    }

    #[test]
    fn kinematics() {
        let s = scenario(3);
        let bvh = Bvh::build(&[], 1.5).unwrap();
        let r = replay(&[z(0.0), z(4.0), z(8.0)], &s, &bvh, 1.5).unwrap();
        assert_eq!(r.path_length, 8.0);
        assert_eq!(r.a_max_observed, 0.0);
        assert_eq!(r.mean_visibility, 1.0);
        assert!(r.collision_free);
        let r = replay(&[z(0.0), z(4.0), z(4.0)], &s, &bvh, 1.5).unwrap();
        assert_eq!((r.v_max_observed, r.a_max_observed), (8.0, 16.0));
    }

    #[test]
    fn replay_errors_and_clearance() {
        let s = scenario(3);
        let bvh = Bvh::build(&[], 1.5).unwrap();
        assert_eq!(replay(&[], &s, &bvh, 1.5), Err(ReplayError::Empty));
        assert!(matches!(replay(&[z(0.0), z(1.0)], &s, &bvh, 1.5), Err(ReplayError::LengthMismatch { .. })));
        assert_eq!(replay(&[z(0.0)], &s, &bvh, 1.5).unwrap().path_length, 0.0);
        let b = ObstacleBox::axis_aligned(Vec3::new(4.0, 1.5, 22.0), Vec3::new(1.0, 1.0, 1.0), "b").unwrap();
        let bvh = Bvh::build(&[b], 1.5).unwrap();
        let r = replay(&[z(0.0), z(4.0), z(8.0)], &s, &bvh, 1.5).unwrap();
        assert!(!r.collision_free);
    }

    fn report(frames: Vec<f64>) -> EvalReport {
        let n = frames.len();
        EvalReport {
            mean_visibility: frames.iter().sum::<f64>() / n as f64,
            per_frame_visibility: frames,
            path_length: 0.0,
            min_clearance: 10.0,
            collision_free: true,
            v_max_observed: 0.0,
            a_max_observed: 0.0,
            n_frames: n,
        }
    }

    #[test]
    fn pp_delta() {
        let mut b = report(vec![1.0, 1.0]);
        let mut o = report(vec![1.0, 1.0]);
        b.mean_visibility = 0.9763;
        o.mean_visibility = 0.9748;
        let d = compare(&b, &o);
        assert!((d.delta().unwrap().delta_pp + 0.15).abs() < 1e-9);
        let same = report(vec![0.8, 0.4, 1.0]);
        let d = compare(&same, &same.clone());
        let d = d.delta().unwrap();
        assert!(d.frame_identical);
        assert_eq!(d.delta_pp, 0.0);
        assert_eq!(
            compare(&report(vec![1.0]), &same),
            Comparison::Excluded { base_degenerate: true, ours_degenerate: false }
        );
    }

    fn entry(profile: &str, converged: bool, runtime: f64, vis: f64) -> CohortEntry {
        CohortEntry {
            scenario_id: profile.to_string() + ".0000",
            profile: profile.to_string(),
            converged,
            runtime,
            expansions: 10,
            mean_visibility: vis,
            collision_free: true,
            comparison: None,
        }
    }

    #[test]
    fn aggregates() {
        let one = aggregate_cohort(&[entry("open", true, 0.25, 1.0)], &[]);
        assert_eq!((one.p99_runtime, one.max_runtime, one.median_runtime), (0.25, 0.25, 0.25));
        assert_eq!(one.converged, 1);
        let es = vec![
            entry("open", true, 1.0, 0.9),
            entry("vegetation-like", true, 2.0, 0.0),
            entry("urban-dense", false, 3.0, 0.2),
            entry("canyon", true, 4.0, 0.6),
        ];
        let s = aggregate_cohort(&es, &["vegetation-like"]);
        assert_eq!((s.n, s.converged, s.fallbacks), (4, 3, 1));
        assert!((s.mean_visibility.unwrap() - 0.5).abs() < 1e-12);
        assert!((s.mean_visibility_excl.unwrap() - 0.75).abs() < 1e-12);
        assert!(s.mean_visibility_excl > s.mean_visibility);
        assert_eq!(s.median_runtime, 2.5);
        assert_eq!(s.p99_runtime, 4.0);
    }

    #[test]
    fn nearest_rank() {
        let xs: Vec<f64> = (1..=200).map(|i| i as f64).collect();
        assert_eq!(percentile(&xs, 0.99), 198.0);
        assert_eq!(percentile(&xs[..10], 0.99), 10.0);
    }
}
