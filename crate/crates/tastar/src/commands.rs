//! The CLI subcommands as library functions.

use std::fs;
use std::path::Path;

use tastar_core::generator::{generate_synthetic_cohort, CohortOptions, Profile};
use tastar_core::metrics::replay;
use tastar_core::{effective_config, BeamWidth, Bvh, PlannerConfig, RayCount, Scenario, SearchStructure};

use crate::formats::{read_scenario, read_trajectory, write_scenario, CohortDir, Manifest};
use crate::harness::{beam_label, run_batch, BatchOutput, Job, Variant};
use crate::records::{write_meta, write_records, EvalJson};
use crate::summary::{self, sweep_job_name, ResultSet, REFERENCE};
use crate::Error;

/// Flags shared by the benchmark subcommands.
#[derive(Clone, Debug)]
pub struct RunFlags {
    pub workers: usize,
    pub cap: u64,
    pub beam: BeamWidth,
    pub rays: RayCount,
    /// Restrict the cohort to these profiles; empty means all.
    pub profiles: Vec<Profile>,
}

impl Default for RunFlags {
    fn default() -> Self {
        RunFlags { workers: 32, cap: 5_000_000, beam: BeamWidth::Finite(2048), rays: RayCount::Five, profiles: Vec::new() }
    }
}

impl RunFlags {
    pub fn base_config(&self) -> PlannerConfig {
        PlannerConfig { expansion_cap: self.cap, beam_width: self.beam, ray_count: self.rays, ..PlannerConfig::default() }
    }

    fn select(&self, scenarios: Vec<Scenario>) -> Vec<Scenario> {
        if self.profiles.is_empty() {
            return scenarios;
        }
        let names: Vec<&str> = self.profiles.iter().map(|p| p.name()).collect();
        scenarios.into_iter().filter(|s| names.contains(&s.profile())).collect()
    }
}

/// What a benchmark subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    pub batch: BatchOutput,
    /// `(file name, CSV text)` as written under `summary/`.
    pub tables: Vec<(&'static str, String)>,
    /// Run failures plus any violated invariant; empty on success.
    pub failures: Vec<String>,
}

pub fn cmd_generate(seed: u64, n: usize, profiles: &[Profile], opts: &CohortOptions, out: &Path) -> Result<Manifest, Error> {
    let dir = CohortDir::new(out);
    let sdir = dir.scenarios();
    fs::create_dir_all(&sdir).map_err(|e| Error::io(&sdir, e))?;
    let mut ids = Vec::new();
    for &p in profiles {
        for s in generate_synthetic_cohort(seed, n, p, opts)? {
            write_scenario(&dir.scenario(&s.id), &s)?;
            ids.push(s.id);
        }
    }
    let manifest = Manifest {
        seed,
        profiles: profiles.iter().map(|p| p.name().to_string()).collect(),
        per_profile: n,
        length_range: [opts.length_range.0, opts.length_range.1],
        scenarios: ids,
    };
    let mp = dir.manifest();
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&mp, text).map_err(|e| Error::io(&mp, e))?;
    Ok(manifest)
}

fn persist(out: &CohortDir, batch: &BatchOutput) -> Result<Vec<(&'static str, String)>, Error> {
    let mut set = ResultSet::new();
    for j in &batch.jobs {
        write_records(&out.records(&j.meta.variant), &j.records)?;
        write_meta(&out.results(&j.meta.variant).join("run.json"), &j.meta)?;
        set.insert(j.meta.variant.clone(), (j.meta.clone(), j.records.clone()));
    }
    let tables = summary::tables(&set)?;
    summary::write_tables(&out.summary(), &tables)?;
    Ok(tables)
}

fn run(cohort: &Path, out: &Path, flags: &RunFlags, jobs: &[Job]) -> Result<Outcome, Error> {
    let scenarios = flags.select(CohortDir::new(cohort).load()?);
    let batch = run_batch(&scenarios, jobs, flags.workers)?;
    let tables = persist(&CohortDir::new(out), &batch)?;
    let failures = batch.failures.clone();
    Ok(Outcome { batch, tables, failures })
}

/// Baseline (B0) against TA* (B4) under one shared cap.
pub fn cmd_compare(cohort: &Path, out: &Path, flags: &RunFlags) -> Result<Outcome, Error> {
    let base = flags.base_config();
    let jobs = [Variant::B0.job(&base), Variant::B4.job(&base).against(0)];
    run(cohort, out, flags, &jobs)
}

/// B0-B4, failing if caching changes any output.
pub fn cmd_ablate(cohort: &Path, out: &Path, flags: &RunFlags) -> Result<Outcome, Error> {
    let base = flags.base_config();
    let jobs: Vec<Job> = Variant::ALL.iter().map(|v| v.job(&base)).collect();
    let mut o = run(cohort, out, flags, &jobs)?;
    for (a, b) in [("B0", "B1"), ("B3", "B4")] {
        if let (Some(x), Some(y)) = (o.batch.records(a), o.batch.records(b)) {
            for m in summary::transparency_mismatches(x, y) {
                o.failures.push(format!("{m}: {a} and {b} outputs differ"));
            }
        }
    }
    Ok(o)
}

/// The four named `(rays, beam)` configurations run by default.
pub fn default_sweep() -> Vec<(RayCount, BeamWidth)> {
    use BeamWidth::Finite;
    vec![
        (RayCount::One, Finite(128)),
        (RayCount::Five, Finite(128)),
        (RayCount::Three, Finite(1500)),
        (RayCount::Five, Finite(2048)),
    ]
}

/// The default named configurations plus the cross product of `rays` and
/// `beams`, without repeats.
pub fn sweep_configs(rays: &[RayCount], beams: &[BeamWidth]) -> Vec<(RayCount, BeamWidth)> {
    let mut out = default_sweep();
    for &r in rays {
        for &b in beams {
            if !out.contains(&(r, b)) {
                out.push((r, b));
            }
        }
    }
    out
}

/// Options of the built-in 20-scenario sweep benchmark.
pub fn sweep_benchmark_options() -> CohortOptions {
    CohortOptions { length_range: (28.0, 42.0), ..CohortOptions::default() }
}

pub const SWEEP_BENCHMARK_SIZE: usize = 20;

/// Each configuration against exact TA* (unbounded beam, five rays, no cap).
/// B0 runs too, for speedups. A cohort directory without a manifest gets the
/// built-in occlusion-pocket benchmark generated from `seed`.
pub fn cmd_sweep(cohort: &Path, out: &Path, flags: &RunFlags, seed: u64, configs: &[(RayCount, BeamWidth)]) -> Result<Outcome, Error> {
    if !CohortDir::new(cohort).manifest().is_file() {
        eprintln!("no manifest under {}; generating the default sweep benchmark", cohort.display());
        cmd_generate(seed, SWEEP_BENCHMARK_SIZE, &[Profile::OcclusionPocket], &sweep_benchmark_options(), cohort)?;
    }
    let base = flags.base_config();
    let reference = PlannerConfig {
        structure: SearchStructure::LayeredDag,
        use_cache: true,
        beam_width: BeamWidth::Unbounded,
        ray_count: RayCount::Five,
        expansion_cap: u64::MAX,
        ..base
    };
    let mut jobs = vec![Variant::B0.job(&base), Job { name: REFERENCE.into(), cfg: reference, reference: None }];
    for &(r, b) in configs {
        let cfg = PlannerConfig { ray_count: r, beam_width: b, ..Variant::B4.config(&base) };
        jobs.push(Job { name: sweep_job_name(r.count(), &beam_label(b)), cfg, reference: Some(1) });
    }
    run(cohort, out, flags, &jobs)
}

/// Replays an external trajectory with the full ray set.
pub fn cmd_replay(trajectory: &Path, scenario: &Path) -> Result<EvalJson, Error> {
    let s = read_scenario(scenario)?;
    let traj = read_trajectory(trajectory)?;
    let d_safe = effective_config(&s, &PlannerConfig::default()).d_safe;
    let bvh = Bvh::build(&s.obstacles, d_safe)?;
    let r = replay(&traj, &s, &bvh, d_safe)?;
    Ok(EvalJson::from(&r))
}

/// Rebuilds every summary table from the persisted results of `cohort`.
pub fn cmd_report_data(cohort: &Path, out: &Path) -> Result<Vec<(&'static str, String)>, Error> {
    let set = summary::load_results(&CohortDir::new(cohort).root.join("results"))?;
    if set.is_empty() {
        return Err(Error::Other(format!("no results under {}", cohort.display())));
    }
    let tables = summary::tables(&set)?;
    summary::write_tables(out, &tables)?;
    Ok(tables)
}
