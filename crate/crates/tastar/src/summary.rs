//! Summary tables, computed only from run records and run metadata so that
//! `report-data` can rebuild them from disk.
//!
//! | file | rows |
//! |---|---|
//! | `compare_runtime.csv` | one per planner (B0, B4) |
//! | `compare_visibility.csv` | one; both-converged scenarios only |
//! | `compare_profiles.csv` | one per profile |
//! | `ablation.csv` | one per variant B0-B4 |
//! | `sweep.csv` | one per (rays, beam) configuration |

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tastar_core::metrics::aggregate_cohort;
use tastar_core::CohortEntry;

use crate::records::{RunMeta, RunRecord};
use crate::Error;

/// Profiles left out of `mean_visibility_excl`.
pub const EXCLUDED_PROFILES: &[&str] = &["vegetation-like"];

pub const REFERENCE: &str = "sweep-ref";
pub const SWEEP_PREFIX: &str = "sweep-r";

/// Every variant of one results directory, keyed by name.
pub type ResultSet = BTreeMap<String, (RunMeta, Vec<RunRecord>)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub variant: String,
    pub structure: String,
    pub use_cache: bool,
    pub beam: String,
    pub rays: usize,
    pub expansion_cap: u64,
    pub n: usize,
    pub converged: usize,
    pub fallbacks: usize,
    pub mean_runtime_ms: f64,
    pub median_runtime_ms: f64,
    pub p99_runtime_ms: f64,
    pub max_runtime_ms: f64,
    pub summed_runtime_ms: f64,
    pub wall_ms: f64,
    pub workers: usize,
    pub mean_expansions: f64,
    pub mean_visibility: Option<f64>,
    pub mean_visibility_excl: Option<f64>,
    pub collision_free_converged: usize,
}

pub fn runtime_row(meta: &RunMeta, recs: &[RunRecord]) -> RuntimeRow {
    let entries: Vec<CohortEntry> = recs.iter().map(RunRecord::entry).collect();
    let s = aggregate_cohort(&entries, EXCLUDED_PROFILES);
    RuntimeRow {
        variant: meta.variant.clone(),
        structure: meta.structure.clone(),
        use_cache: meta.use_cache,
        beam: meta.beam.clone(),
        rays: meta.rays,
        expansion_cap: meta.expansion_cap,
        n: s.n,
        converged: s.converged,
        fallbacks: s.fallbacks,
        mean_runtime_ms: s.mean_runtime,
        median_runtime_ms: s.median_runtime,
        p99_runtime_ms: s.p99_runtime,
        max_runtime_ms: s.max_runtime,
        summed_runtime_ms: s.total_runtime,
        wall_ms: meta.wall_ms,
        workers: meta.workers,
        mean_expansions: s.mean_expansions,
        mean_visibility: s.mean_visibility,
        mean_visibility_excl: s.mean_visibility_excl,
        collision_free_converged: s.collision_free_converged,
    }
}

/// Pairs of (base, ours) records with the same scenario, in `ours` order.
fn pairs<'a>(base: &'a [RunRecord], ours: &'a [RunRecord]) -> Vec<(&'a RunRecord, &'a RunRecord)> {
    let by_id: BTreeMap<&str, &RunRecord> = base.iter().map(|r| (r.scenario_id.as_str(), r)).collect();
    ours.iter().filter_map(|o| Some((*by_id.get(o.scenario_id.as_str())?, o))).collect()
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn min(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    xs.into_iter().min_by(f64::total_cmp)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityRow {
    pub base: String,
    pub ours: String,
    pub scenarios: usize,
    pub both_converged: usize,
    pub excluded: usize,
    pub base_mean_visibility: Option<f64>,
    pub ours_mean_visibility: Option<f64>,
    pub mean_delta_pp: Option<f64>,
    pub worst_delta_pp: Option<f64>,
    pub frame_identical: usize,
    pub better: usize,
    pub worse: usize,
}

struct Block {
    both: usize,
    excluded: usize,
    base_vis: Option<f64>,
    ours_vis: Option<f64>,
    mean_delta: Option<f64>,
    worst_delta: Option<f64>,
    identical: usize,
    better: usize,
    worse: usize,
}

fn block(ps: &[(&RunRecord, &RunRecord)]) -> Block {
    use crate::records::ComparisonJson as C;
    let both: Vec<_> = ps
        .iter()
        .filter(|(b, o)| b.plan.converged && o.plan.converged && matches!(o.comparison, Some(C::Delta { .. })))
        .collect();
    let deltas: Vec<f64> = both.iter().filter_map(|(_, o)| o.comparison.as_ref()?.delta_pp()).collect();
    Block {
        both: both.len(),
        excluded: ps.len() - both.len(),
        base_vis: mean(both.iter().map(|(b, _)| b.eval.mean_visibility)),
        ours_vis: mean(both.iter().map(|(_, o)| o.eval.mean_visibility)),
        mean_delta: mean(deltas.iter().copied()),
        worst_delta: min(deltas.iter().copied()),
        identical: both
            .iter()
            .filter(|(_, o)| matches!(o.comparison, Some(C::Delta { frame_identical: true, .. })))
            .count(),
        better: deltas.iter().filter(|d| **d > 0.0).count(),
        worse: deltas.iter().filter(|d| **d < 0.0).count(),
    }
}

pub fn visibility_row(base: &[RunRecord], ours: &[RunRecord]) -> VisibilityRow {
    let ps = pairs(base, ours);
    let b = block(&ps);
    VisibilityRow {
        base: base.first().map(|r| r.variant.clone()).unwrap_or_default(),
        ours: ours.first().map(|r| r.variant.clone()).unwrap_or_default(),
        scenarios: ps.len(),
        both_converged: b.both,
        excluded: b.excluded,
        base_mean_visibility: b.base_vis,
        ours_mean_visibility: b.ours_vis,
        mean_delta_pp: b.mean_delta,
        worst_delta_pp: b.worst_delta,
        frame_identical: b.identical,
        better: b.better,
        worse: b.worse,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub profile: String,
    pub n: usize,
    pub base_converged: usize,
    pub ours_converged: usize,
    pub base_mean_runtime_ms: f64,
    pub ours_mean_runtime_ms: f64,
    pub speedup: Option<f64>,
    pub both_converged: usize,
    pub base_mean_visibility: Option<f64>,
    pub ours_mean_visibility: Option<f64>,
    pub mean_delta_pp: Option<f64>,
    pub worst_delta_pp: Option<f64>,
}

pub fn profile_rows(base: &[RunRecord], ours: &[RunRecord]) -> Vec<ProfileRow> {
    let mut groups: BTreeMap<&str, Vec<(&RunRecord, &RunRecord)>> = BTreeMap::new();
    for (b, o) in pairs(base, ours) {
        groups.entry(o.profile.as_str()).or_default().push((b, o));
    }
    groups
        .into_iter()
        .map(|(profile, ps)| {
            let bl = block(&ps);
            let brt = mean(ps.iter().map(|(b, _)| b.timing.planner_ms)).unwrap_or(0.0);
            let ort = mean(ps.iter().map(|(_, o)| o.timing.planner_ms)).unwrap_or(0.0);
            ProfileRow {
                profile: profile.to_string(),
                n: ps.len(),
                base_converged: ps.iter().filter(|(b, _)| b.plan.converged).count(),
                ours_converged: ps.iter().filter(|(_, o)| o.plan.converged).count(),
                base_mean_runtime_ms: brt,
                ours_mean_runtime_ms: ort,
                speedup: (ort > 0.0).then(|| brt / ort),
                both_converged: bl.both,
                base_mean_visibility: bl.base_vis,
                ours_mean_visibility: bl.ours_vis,
                mean_delta_pp: bl.mean_delta,
                worst_delta_pp: bl.worst_delta,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: String,
    pub structure: String,
    pub use_cache: bool,
    pub beam: String,
    pub expansion_cap: u64,
    pub n: usize,
    pub converged: usize,
    pub fallbacks: usize,
    pub mean_runtime_ms: f64,
    pub max_runtime_ms: f64,
    pub speedup_vs_b0: Option<f64>,
    pub mean_expansions: f64,
    /// The cache-free twin this variant must reproduce exactly.
    pub twin: Option<String>,
    pub identical_to_twin: Option<bool>,
}

/// Scenario ids where `a` and `b` disagree in anything but timing.
pub fn transparency_mismatches(a: &[RunRecord], b: &[RunRecord]) -> Vec<String> {
    let mut out: Vec<String> = pairs(a, b).into_iter().filter(|(x, y)| !x.same_output(y)).map(|(x, _)| x.scenario_id.clone()).collect();
    if a.len() != b.len() {
        out.push(format!("record counts differ ({} vs {})", a.len(), b.len()));
    }
    out
}

pub fn ablation_rows(set: &ResultSet) -> Vec<AblationRow> {
    let b0_rt = set.get("B0").and_then(|(_, r)| mean(r.iter().map(|x| x.timing.planner_ms)));
    ["B0", "B1", "B2", "B3", "B4"]
        .iter()
        .filter_map(|&v| {
            let (meta, recs) = set.get(v)?;
            let rt = runtime_row(meta, recs);
            let twin = match v {
                "B1" => Some("B0"),
                "B4" => Some("B3"),
                _ => None,
            };
            let identical = twin.and_then(|t| set.get(t)).map(|(_, tr)| transparency_mismatches(tr, recs).is_empty());
            Some(AblationRow {
                variant: v.to_string(),
                structure: meta.structure.clone(),
                use_cache: meta.use_cache,
                beam: meta.beam.clone(),
                expansion_cap: meta.expansion_cap,
                n: rt.n,
                converged: rt.converged,
                fallbacks: rt.fallbacks,
                mean_runtime_ms: rt.mean_runtime_ms,
                max_runtime_ms: rt.max_runtime_ms,
                speedup_vs_b0: b0_rt.filter(|_| rt.mean_runtime_ms > 0.0).map(|b| b / rt.mean_runtime_ms),
                mean_expansions: rt.mean_expansions,
                twin: twin.map(String::from),
                identical_to_twin: identical,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config: String,
    pub rays: usize,
    pub beam: String,
    pub n: usize,
    pub converged: usize,
    pub fallbacks: usize,
    pub mean_runtime_ms: f64,
    pub speedup_vs_b0: Option<f64>,
    /// Replayed with all five rays, over converged runs.
    pub mean_visibility: Option<f64>,
    /// Scenarios where both this configuration and the reference converged.
    pub compared: usize,
    pub mean_delta_pp: Option<f64>,
    /// Most negative per-scenario change against the reference.
    pub worst_loss_pp: Option<f64>,
}

pub fn sweep_job_name(rays: usize, beam: &str) -> String {
    format!("{SWEEP_PREFIX}{rays}-b{beam}")
}

fn beam_key(beam: &str) -> u64 {
    beam.parse().unwrap_or(u64::MAX)
}

pub fn sweep_rows(set: &ResultSet) -> Vec<SweepRow> {
    let Some((_, reference)) = set.get(REFERENCE) else { return Vec::new() };
    let b0_rt = set.get("B0").and_then(|(_, r)| mean(r.iter().map(|x| x.timing.planner_ms)));
    let mut rows: Vec<SweepRow> = set
        .iter()
        .filter(|(k, _)| k.starts_with(SWEEP_PREFIX))
        .map(|(name, (meta, recs))| {
            let rt = runtime_row(meta, recs);
            let ps = pairs(reference, recs);
            let bl = block(&ps);
            SweepRow {
                config: name.clone(),
                rays: meta.rays,
                beam: meta.beam.clone(),
                n: rt.n,
                converged: rt.converged,
                fallbacks: rt.fallbacks,
                mean_runtime_ms: rt.mean_runtime_ms,
                speedup_vs_b0: b0_rt.filter(|_| rt.mean_runtime_ms > 0.0).map(|b| b / rt.mean_runtime_ms),
                mean_visibility: rt.mean_visibility,
                compared: bl.both,
                mean_delta_pp: bl.mean_delta,
                worst_loss_pp: bl.worst_delta,
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.rays, beam_key(&r.beam)));
    rows
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Other(format!("CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Every table the result set supports, as `(file name, CSV text)`.
pub fn tables(set: &ResultSet) -> Result<Vec<(&'static str, String)>, Error> {
    let mut out = Vec::new();
    if let (Some((bm, b)), Some((om, o))) = (set.get("B0"), set.get("B4")) {
        out.push(("compare_runtime.csv", to_csv(&[runtime_row(bm, b), runtime_row(om, o)])?));
        out.push(("compare_visibility.csv", to_csv(&[visibility_row(b, o)])?));
        out.push(("compare_profiles.csv", to_csv(&profile_rows(b, o))?));
    }
    if ["B1", "B2", "B3"].iter().all(|v| set.contains_key(*v)) {
        out.push(("ablation.csv", to_csv(&ablation_rows(set))?));
    }
    if set.contains_key(REFERENCE) {
        out.push(("sweep.csv", to_csv(&sweep_rows(set))?));
    }
    Ok(out)
}

pub fn write_tables(dir: &Path, tables: &[(&str, String)]) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, text) in tables {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

/// Reads every `results/<variant>/{run.json, records.jsonl}` pair under `results`.
pub fn load_results(results: &Path) -> Result<ResultSet, Error> {
    let mut set = ResultSet::new();
    let rd = fs::read_dir(results).map_err(|e| Error::io(results, e))?;
    for entry in rd {
        let entry = entry.map_err(|e| Error::io(results, e))?;
        let dir = entry.path();
        let (meta, recs) = (dir.join("run.json"), dir.join("records.jsonl"));
        if !meta.is_file() || !recs.is_file() {
            continue;
        }
        let meta = crate::records::read_meta(&meta)?;
        let recs = crate::records::read_records(&recs)?;
        set.insert(meta.variant.clone(), (meta, recs));
    }
    Ok(set)
}
