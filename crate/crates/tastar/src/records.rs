//! Per-scenario run records (`results/<variant>/records.jsonl`) and the
//! per-variant run metadata (`results/<variant>/run.json`).
//!
//! One JSON object per line. Everything except the `timing` object is a pure
//! function of the scenario and the planner configuration.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tastar_core::{CohortEntry, Comparison, DeltaReport, EvalReport, PlanResult};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub converged: bool,
    pub expansions: u64,
    pub total_cost: f64,
    pub n_states: usize,
    pub max_frontier: usize,
    pub max_unpruned_frontier: usize,
    pub per_layer_frontier_sizes: Vec<usize>,
}

impl From<&PlanResult> for PlanSummary {
    fn from(r: &PlanResult) -> Self {
        PlanSummary {
            converged: r.converged,
            expansions: r.expansions,
            total_cost: r.total_cost,
            n_states: r.trajectory.len(),
            max_frontier: r.per_layer_frontier_sizes.iter().copied().max().unwrap_or(0),
            max_unpruned_frontier: r.max_unpruned_frontier,
            per_layer_frontier_sizes: r.per_layer_frontier_sizes.clone(),
        }
    }
}

/// Replay metrics. `min_clearance` is `null` when there are no obstacles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalJson {
    pub mean_visibility: f64,
    pub path_length: f64,
    pub min_clearance: Option<f64>,
    pub collision_free: bool,
    pub v_max_observed: f64,
    pub a_max_observed: f64,
    pub n_frames: usize,
    pub per_frame_visibility: Vec<f64>,
}

impl From<&EvalReport> for EvalJson {
    fn from(e: &EvalReport) -> Self {
        EvalJson {
            mean_visibility: e.mean_visibility,
            path_length: e.path_length,
            min_clearance: e.min_clearance.is_finite().then_some(e.min_clearance),
            collision_free: e.collision_free,
            v_max_observed: e.v_max_observed,
            a_max_observed: e.a_max_observed,
            n_frames: e.n_frames,
            per_frame_visibility: e.per_frame_visibility.clone(),
        }
    }
}

impl From<&EvalJson> for EvalReport {
    fn from(e: &EvalJson) -> Self {
        EvalReport {
            per_frame_visibility: e.per_frame_visibility.clone(),
            mean_visibility: e.mean_visibility,
            path_length: e.path_length,
            min_clearance: e.min_clearance.unwrap_or(f64::INFINITY),
            collision_free: e.collision_free,
            v_max_observed: e.v_max_observed,
            a_max_observed: e.a_max_observed,
            n_frames: e.n_frames,
        }
    }
}

/// Visibility against the reference variant of the same run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ComparisonJson {
    Delta { reference: String, delta_pp: f64, frame_identical: bool, per_frame_delta: Vec<f64> },
    Excluded { reference: String, base_degenerate: bool, ours_degenerate: bool },
}

impl ComparisonJson {
    pub fn new(reference: &str, c: &Comparison) -> Self {
        let reference = reference.to_string();
        match c {
            Comparison::Delta(d) => ComparisonJson::Delta {
                reference,
                delta_pp: d.delta_pp,
                frame_identical: d.frame_identical,
                per_frame_delta: d.per_frame_delta.clone(),
            },
            Comparison::Excluded { base_degenerate, ours_degenerate } => ComparisonJson::Excluded {
                reference,
                base_degenerate: *base_degenerate,
                ours_degenerate: *ours_degenerate,
            },
        }
    }

    pub fn to_core(&self) -> Comparison {
        match self {
            ComparisonJson::Delta { delta_pp, frame_identical, per_frame_delta, .. } => Comparison::Delta(DeltaReport {
                delta_pp: *delta_pp,
                frame_identical: *frame_identical,
                per_frame_delta: per_frame_delta.clone(),
            }),
            ComparisonJson::Excluded { base_degenerate, ours_degenerate, .. } => {
                Comparison::Excluded { base_degenerate: *base_degenerate, ours_degenerate: *ours_degenerate }
            }
        }
    }

    pub fn delta_pp(&self) -> Option<f64> {
        match self {
            ComparisonJson::Delta { delta_pp, .. } => Some(*delta_pp),
            ComparisonJson::Excluded { .. } => None,
        }
    }
}

/// Wall-clock fields, the only nondeterministic part of a record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Planner call only.
    pub planner_ms: f64,
    /// Shared by every variant run on the scenario.
    pub bvh_build_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario_id: String,
    pub profile: String,
    pub variant: String,
    pub plan: PlanSummary,
    pub eval: EvalJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonJson>,
    pub trajectory: Vec<[f64; 3]>,
    pub timing: Timing,
}

impl RunRecord {
    /// Runtime in the cohort tables is planner milliseconds.
    pub fn entry(&self) -> CohortEntry {
        CohortEntry {
            scenario_id: self.scenario_id.clone(),
            profile: self.profile.clone(),
            converged: self.plan.converged,
            runtime: self.timing.planner_ms,
            expansions: self.plan.expansions,
            mean_visibility: self.eval.mean_visibility,
            collision_free: self.eval.collision_free,
            comparison: self.comparison.as_ref().map(ComparisonJson::to_core),
        }
    }

    /// Same planner output, ignoring variant name, comparison and timing.
    pub fn same_output(&self, o: &RunRecord) -> bool {
        self.scenario_id == o.scenario_id
            && self.plan == o.plan
            && self.plan.total_cost.to_bits() == o.plan.total_cost.to_bits()
            && self.eval == o.eval
            && self.trajectory.len() == o.trajectory.len()
            && self
                .trajectory
                .iter()
                .zip(&o.trajectory)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()))
    }
}

/// Batch metadata for one variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub variant: String,
    pub structure: String,
    pub use_cache: bool,
    /// `"inf"` or a number.
    pub beam: String,
    pub rays: usize,
    pub expansion_cap: u64,
    pub workers: usize,
    pub n: usize,
    pub wall_ms: f64,
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, Error> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| Error::Other(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

pub fn write_meta(path: &Path, meta: &RunMeta) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_meta(path: &Path) -> Result<RunMeta, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).context(path))
}

/// A JSONL file with every `timing` object removed, for byte comparisons.
pub fn strip_timing(jsonl: &str) -> Result<String, Error> {
    let mut out = String::new();
    for line in jsonl.lines().filter(|l| !l.trim().is_empty()) {
        let mut v: serde_json::Value = serde_json::from_str(line)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("timing");
        }
        out.push_str(&serde_json::to_string(&v)?);
        out.push('\n');
    }
    Ok(out)
}
