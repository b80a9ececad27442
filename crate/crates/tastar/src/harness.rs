//! Parallel batch runner: every job (variant) over every scenario.
//!
//! BVHs are built once per scenario and shared by all jobs. Each job is a
//! separate scenario-level fan-out on a fixed-size pool so its wall clock can
//! be reported on its own. Results come back in scenario-id order whatever
//! the worker count.

use std::time::Instant;

use rayon::prelude::*;
use tastar_core::metrics::{compare, replay};
use tastar_core::{effective_config, BeamWidth, Bvh, PlannerConfig, RayCount, Scenario, SearchStructure, Vec3};

use crate::records::{ComparisonJson, EvalJson, PlanSummary, RunMeta, RunRecord, Timing};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    B0,
    B1,
    B2,
    B3,
    B4,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::B0, Variant::B1, Variant::B2, Variant::B3, Variant::B4];

    pub fn id(self) -> &'static str {
        match self {
            Variant::B0 => "B0",
            Variant::B1 => "B1",
            Variant::B2 => "B2",
            Variant::B3 => "B3",
            Variant::B4 => "B4",
        }
    }

    /// `base` carries the shared settings (rays, beam for B3/B4, cap).
    /// B2 gets twenty times the cap.
    pub fn config(self, base: &PlannerConfig) -> PlannerConfig {
        let mut c = *base;
        let (structure, cache) = match self {
            Variant::B0 => (SearchStructure::PriorityQueue, false),
            Variant::B1 => (SearchStructure::PriorityQueue, true),
            Variant::B2 => (SearchStructure::LayeredDag, true),
            Variant::B3 => (SearchStructure::LayeredDag, false),
            Variant::B4 => (SearchStructure::LayeredDag, true),
        };
        c.structure = structure;
        c.use_cache = cache;
        if self == Variant::B2 {
            c.beam_width = BeamWidth::Unbounded;
            c.expansion_cap = base.expansion_cap.saturating_mul(20);
        }
        c
    }

    pub fn job(self, base: &PlannerConfig) -> Job {
        Job { name: self.id().into(), cfg: self.config(base), reference: None }
    }
}

pub fn beam_label(b: BeamWidth) -> String {
    match b {
        BeamWidth::Finite(n) => n.to_string(),
        BeamWidth::Unbounded => "inf".into(),
    }
}

pub fn parse_beam(s: &str) -> Result<BeamWidth, String> {
    match s {
        "inf" | "∞" => Ok(BeamWidth::Unbounded),
        _ => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(BeamWidth::Finite(n)),
            _ => Err(format!("beam must be a positive integer or \"inf\", got {s:?}")),
        },
    }
}

pub fn parse_rays(s: &str) -> Result<RayCount, String> {
    s.parse::<u32>().ok().and_then(RayCount::from_count).ok_or_else(|| format!("rays must be 1, 3 or 5, got {s:?}"))
}

/// One planner configuration to run over the cohort.
#[derive(Clone, Debug)]
pub struct Job {
    pub name: String,
    pub cfg: PlannerConfig,
    /// Index of an earlier job to compare visibility against.
    pub reference: Option<usize>,
}

impl Job {
    pub fn against(mut self, reference: usize) -> Job {
        self.reference = Some(reference);
        self
    }
}

#[derive(Clone, Debug)]
pub struct JobOutput {
    pub meta: RunMeta,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Default)]
pub struct BatchOutput {
    pub jobs: Vec<JobOutput>,
    /// `"<scenario> [<job>]: <error>"`, one per failed run.
    pub failures: Vec<String>,
}

impl BatchOutput {
    pub fn records(&self, name: &str) -> Option<&[RunRecord]> {
        self.jobs.iter().find(|j| j.meta.variant == name).map(|j| j.records.as_slice())
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn structure_label(s: SearchStructure) -> &'static str {
    match s {
        SearchStructure::PriorityQueue => "priority_queue",
        SearchStructure::LayeredDag => "layered_dag",
    }
}

struct Prepared<'a> {
    scenario: &'a Scenario,
    bvh: Result<Bvh, String>,
    bvh_ms: f64,
}

struct Run {
    result: tastar_core::PlanResult,
    eval: tastar_core::EvalReport,
    planner_ms: f64,
}

fn run_one(p: &Prepared<'_>, cfg: &PlannerConfig) -> Result<Run, String> {
    let bvh = p.bvh.as_ref().map_err(Clone::clone)?;
    let eff = effective_config(p.scenario, cfg);
    if eff.d_safe != bvh.inflation() {
        return Err(format!("scenario d_safe {} differs from the shared BVH inflation", eff.d_safe));
    }
    let t0 = Instant::now();
    let result = tastar_core::plan(p.scenario, bvh, cfg).map_err(|e| e.to_string())?;
    let planner_ms = ms(t0);
    let eval = replay(&result.trajectory, p.scenario, bvh, eff.d_safe).map_err(|e| e.to_string())?;
    Ok(Run { result, eval, planner_ms })
}

/// Runs every job over `scenarios` on a pool of `workers` threads.
/// Scenarios are processed in id order; a scenario that fails any job is
/// listed in `failures` and left out of every job's records.
pub fn run_batch(scenarios: &[Scenario], jobs: &[Job], workers: usize) -> Result<BatchOutput, Error> {
    for (i, j) in jobs.iter().enumerate() {
        if j.reference.is_some_and(|r| r >= i) {
            return Err(Error::Other(format!("job {} must reference an earlier job", j.name)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Other(format!("thread pool: {e}")))?;
    let mut order: Vec<&Scenario> = scenarios.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));

    let prepared: Vec<Prepared<'_>> = pool.install(|| {
        order
            .par_iter()
            .map(|s| {
                let cfg = jobs.first().map(|j| j.cfg).unwrap_or_default();
                let inflation = effective_config(s, &cfg).d_safe;
                let t0 = Instant::now();
                let bvh = Bvh::build(&s.obstacles, inflation).map_err(|e| e.to_string());
                Prepared { scenario: s, bvh, bvh_ms: ms(t0) }
            })
            .collect()
    });

    let mut runs: Vec<Vec<Result<Run, String>>> = Vec::with_capacity(jobs.len());
    let mut walls = Vec::with_capacity(jobs.len());
    for job in jobs {
        let t0 = Instant::now();
        let out: Vec<Result<Run, String>> = pool.install(|| prepared.par_iter().map(|p| run_one(p, &job.cfg)).collect());
        walls.push(ms(t0));
        runs.push(out);
    }

    let mut failures = Vec::new();
    let mut ok = vec![true; prepared.len()];
    for (job, out) in jobs.iter().zip(&runs) {
        for (k, r) in out.iter().enumerate() {
            if let Err(e) = r {
                failures.push(format!("{} [{}]: {e}", prepared[k].scenario.id, job.name));
                ok[k] = false;
            }
        }
    }

    let mut outputs = Vec::with_capacity(jobs.len());
    for (ji, job) in jobs.iter().enumerate() {
        let mut records = Vec::new();
        for (k, p) in prepared.iter().enumerate() {
            if !ok[k] {
                continue;
            }
            let Ok(run) = &runs[ji][k] else { continue };
            let comparison = job.reference.map(|r| {
                let Ok(base) = &runs[r][k] else { unreachable!("failed scenarios are skipped") };
                ComparisonJson::new(&jobs[r].name, &compare(&base.eval, &run.eval))
            });
            records.push(RunRecord {
                scenario_id: p.scenario.id.clone(),
                profile: p.scenario.profile().to_string(),
                variant: job.name.clone(),
                plan: PlanSummary::from(&run.result),
                eval: EvalJson::from(&run.eval),
                comparison,
                trajectory: run.result.trajectory.iter().map(|v: &Vec3| v.to_array()).collect(),
                timing: Timing { planner_ms: run.planner_ms, bvh_build_ms: p.bvh_ms },
            });
        }
        let meta = RunMeta {
            variant: job.name.clone(),
            structure: structure_label(job.cfg.structure).into(),
            use_cache: job.cfg.use_cache,
            beam: beam_label(job.cfg.beam_width),
            rays: job.cfg.ray_count.count(),
            expansion_cap: job.cfg.expansion_cap,
            workers: workers.max(1),
            n: records.len(),
            wall_ms: walls[ji],
        };
        outputs.push(JobOutput { meta, records });
    }
    Ok(BatchOutput { jobs: outputs, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_matrix() {
        let base = PlannerConfig::default();
        let rows: Vec<_> = Variant::ALL
            .iter()
            .map(|v| {
                let c = v.config(&base);
                (c.structure, c.use_cache, c.beam_width, c.expansion_cap)
            })
            .collect();
        use SearchStructure::*;
        let b = BeamWidth::Finite(2048);
        assert_eq!(
            rows,
            vec![
                (PriorityQueue, false, b, 5_000_000),
                (PriorityQueue, true, b, 5_000_000),
                (LayeredDag, true, BeamWidth::Unbounded, 100_000_000),
                (LayeredDag, false, b, 5_000_000),
                (LayeredDag, true, b, 5_000_000),
            ]
        );
    }

    #[test]
    fn flag_parsing() {
        assert_eq!(parse_beam("inf"), Ok(BeamWidth::Unbounded));
        assert_eq!(parse_beam("128"), Ok(BeamWidth::Finite(128)));
        assert!(parse_beam("0").is_err() && parse_beam("x").is_err());
        assert_eq!(parse_rays("3"), Ok(RayCount::Three));
        assert!(parse_rays("4").is_err());
    }
}
