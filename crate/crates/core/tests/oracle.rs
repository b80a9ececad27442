//! Planner behaviour against the brute-force layered DP.

mod common;

use common::oracle::{self, close, small_scenarios};
use proptest::prelude::*;
use tastar_core::generator::{generate_scenario, CohortOptions};
use tastar_core::metrics::replay;
use tastar_core::{
    baseline, neighbor_offsets, ta_star, BeamWidth, Bvh, PlanResult, PlannerConfig, Profile, Scenario, SearchStructure,
};

fn exact() -> PlannerConfig {
    PlannerConfig { beam_width: BeamWidth::Unbounded, expansion_cap: u64::MAX, ..PlannerConfig::default() }
}

fn bvh(s: &Scenario, cfg: &PlannerConfig) -> Bvh {
    Bvh::build(&s.obstacles, cfg.with_overrides(&s.params).d_safe).unwrap()
}

fn dag(s: &Scenario, cfg: &PlannerConfig) -> PlanResult {
    ta_star::plan(s, &bvh(s, cfg), cfg).unwrap()
}

fn pq(s: &Scenario, cfg: &PlannerConfig) -> PlanResult {
    baseline::plan_baseline(s, &bvh(s, cfg), cfg).unwrap()
}

fn same(a: &PlanResult, b: &PlanResult) -> bool {
    a.trajectory == b.trajectory
        && a.converged == b.converged
        && a.expansions == b.expansions
        && a.total_cost.to_bits() == b.total_cost.to_bits()
}

#[test]
fn exact_planners_match_brute_force() {
    let cohort = small_scenarios(11, 4);
    assert!(cohort.len() >= 50, "{} scenarios", cohort.len());
    let cfg = exact();
    for s in &cohort {
        let o = oracle::solve(s, &cfg);
        assert!(s.target.horizon() <= 12 && o.max_layer <= 500, "{}: T {} layer {}", s.id, s.target.horizon(), o.max_layer);
        let want = o.cost.unwrap_or_else(|| panic!("{}: oracle found no path", s.id));
        let a = dag(s, &cfg);
        let b = pq(s, &cfg);
        assert!(a.converged && b.converged, "{}", s.id);
        assert!(close(a.total_cost, want), "{}: layered {} oracle {want}", s.id, a.total_cost);
        assert!(close(b.total_cost, want), "{}: baseline {} oracle {want}", s.id, b.total_cost);
        oracle::trajectory_ok(s, &cfg, &a.trajectory).unwrap_or_else(|e| panic!("{}: {e}", s.id));
        oracle::trajectory_ok(s, &cfg, &b.trajectory).unwrap_or_else(|e| panic!("{}: {e}", s.id));
    }
}

#[test]
fn wide_beam_is_inert_when_frontier_fits() {
    for s in small_scenarios(12, 2) {
        let inf = dag(&s, &exact());
        assert!(inf.max_unpruned_frontier <= 2048);
        let b = dag(&s, &PlannerConfig { beam_width: BeamWidth::Finite(2048), ..exact() });
        assert!(same(&inf, &b), "{}", s.id);
    }
}

#[test]
fn narrow_beams_never_beat_the_optimum() {
    for s in small_scenarios(13, 2) {
        let want = oracle::solve(&s, &exact()).cost.unwrap();
        for beam in [1, 3, 16, 64] {
            let r = dag(&s, &PlannerConfig { beam_width: BeamWidth::Finite(beam), ..exact() });
            if !r.converged {
                continue;
            }
            assert!(r.total_cost >= want - 1e-9 * want.max(1.0), "{} B={beam}", s.id);
            if r.max_unpruned_frontier <= beam {
                assert!(close(r.total_cost, want), "{} B={beam}: pruning was inert", s.id);
            }
        }
    }
}

#[test]
fn cap_boundary() {
    for s in small_scenarios(14, 1).iter().step_by(3) {
        for planner in [dag as fn(&Scenario, &PlannerConfig) -> PlanResult, pq] {
            let free = planner(s, &exact());
            assert!(free.converged);
            let r = planner(s, &PlannerConfig { expansion_cap: 10, ..exact() });
            assert!(!r.converged && r.trajectory.len() == 1 && r.expansions <= 10, "{}", s.id);
            assert_eq!(r.trajectory[0], free.trajectory[0]);
            let at = planner(s, &PlannerConfig { expansion_cap: free.expansions, ..exact() });
            assert!(same(&at, &free), "{}: cap equal to the work done must converge", s.id);
            let below = planner(s, &PlannerConfig { expansion_cap: free.expansions - 1, ..exact() });
            assert!(!below.converged && below.expansions == free.expansions - 1, "{}", s.id);
        }
    }
}

#[test]
fn work_per_layer_is_bounded_by_beam() {
    let opts = CohortOptions { length_range: (20.0, 30.0), ..CohortOptions::default() };
    for (i, p) in [Profile::Open, Profile::UrbanDense, Profile::OcclusionPocket].into_iter().enumerate() {
        let s = generate_scenario(p, i, 99 + i as u64, &opts).unwrap();
        for beam in [4usize, 32] {
            let cfg = PlannerConfig { beam_width: BeamWidth::Finite(beam), ..PlannerConfig::default() };
            let r = dag(&s, &cfg);
            let n = neighbor_offsets(&cfg).len();
            let sizes = &r.per_layer_frontier_sizes;
            assert!(sizes.iter().all(|&k| k <= beam));
            let bound: usize = sizes[..sizes.len() - 1].iter().map(|k| k * n).sum();
            assert!(r.expansions as usize <= bound && bound <= n * beam * s.target.horizon(), "{}", s.id);
        }
    }
}

#[test]
fn cache_is_transparent() {
    let big = CohortOptions { length_range: (15.0, 25.0), ..CohortOptions::default() };
    let mut cohort = small_scenarios(15, 1);
    cohort.extend(Profile::ALL.iter().map(|&p| generate_scenario(p, 0, 3, &big).unwrap()));
    for s in &cohort {
        for structure in [SearchStructure::LayeredDag, SearchStructure::PriorityQueue] {
            let on = PlannerConfig { structure, ..PlannerConfig::default() };
            let off = PlannerConfig { use_cache: false, ..on };
            let run = |c: &PlannerConfig| tastar_core::plan(s, &bvh(s, c), c).unwrap();
            assert!(same(&run(&on), &run(&off)), "{} {structure:?}", s.id);
        }
    }
}

#[test]
fn outputs_are_feasible_and_replay_clean() {
    let opts = CohortOptions { length_range: (20.0, 35.0), ..CohortOptions::default() };
    for (i, p) in Profile::ALL.into_iter().enumerate() {
        let s = generate_scenario(p, i, 500 + i as u64, &opts).unwrap();
        let cfg = PlannerConfig::default();
        let b = bvh(&s, &cfg);
        for c in [cfg, PlannerConfig { structure: SearchStructure::PriorityQueue, ..cfg }] {
            let r = tastar_core::plan(&s, &b, &c).unwrap();
            if !r.converged {
                continue;
            }
            oracle::trajectory_ok(&s, &c, &r.trajectory).unwrap_or_else(|e| panic!("{}: {e}", s.id));
            let e = replay(&r.trajectory, &s, &b, c.d_safe).unwrap();
            assert!(e.collision_free && e.min_clearance >= c.d_safe, "{}", s.id);
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    for s in small_scenarios(16, 1).iter().take(6) {
        for c in [PlannerConfig::default(), PlannerConfig { structure: SearchStructure::PriorityQueue, ..Default::default() }] {
            assert!(same(&dag(s, &c), &dag(s, &c)) && same(&pq(s, &c), &pq(s, &c)));
        }
    }
}

fn small_scenario() -> impl Strategy<Value = Scenario> {
    let profiles = oracle::small_profiles();
    (0..profiles.len(), any::<u64>(), 0.0f64..3.0, any::<bool>()).prop_map(move |(k, seed, extra, tight)| {
        let opts = if tight && oracle::tight_ok(profiles[k]) {
            CohortOptions { length_range: (4.2 + extra, 4.2 + extra), params: oracle::tight_params() }
        } else {
            CohortOptions { length_range: (1.4 + extra, 1.4 + extra), ..CohortOptions::default() }
        };
        generate_scenario(profiles[k], 0, seed, &opts).expect("small scenario")
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn prop_exact_search_is_optimal(s in small_scenario()) {
        let cfg = exact();
        let a = dag(&s, &cfg);
        let b = pq(&s, &cfg);
        let Some(want) = oracle::solve(&s, &cfg).cost else {
            prop_assert!(!a.converged && !b.converged);
            return Ok(());
        };
        prop_assert!(close(a.total_cost, want), "layered {} oracle {}", a.total_cost, want);
        prop_assert!(close(b.total_cost, want), "baseline {} oracle {}", b.total_cost, want);
    }

    #[test]
    fn prop_cache_and_beam(s in small_scenario(), beam in 1usize..40) {
        let cfg = PlannerConfig { beam_width: BeamWidth::Finite(beam), ..exact() };
        let on = dag(&s, &cfg);
        let off = dag(&s, &PlannerConfig { use_cache: false, ..cfg });
        prop_assert!(same(&on, &off));
        let full = dag(&s, &exact());
        let want = full.total_cost;
        if on.converged {
            prop_assert!(full.converged);
            prop_assert!(on.total_cost >= want - 1e-9 * want.max(1.0));
        }
        let n = neighbor_offsets(&cfg).len() as u64;
        prop_assert!(on.expansions <= n * beam as u64 * s.target.horizon() as u64);
    }
}
