use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tastar::commands::{self, RunFlags};
use tastar::harness::{parse_beam, parse_rays};
use tastar_core::generator::{CohortOptions, Profile};
use tastar_core::{BeamWidth, RayCount};

#[derive(Parser)]
#[command(name = "tastar", version, about = "Visibility-aware trajectory planning benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Cohort directory holding `scenarios/manifest.json`.
    #[arg(long)]
    cohort: PathBuf,
    /// Where results and summaries go; defaults to the cohort directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    workers: u32,
    #[arg(long, default_value_t = 5_000_000)]
    cap: u64,
    /// Beam width for the layered planner, or "inf".
    #[arg(long, default_value = "2048", value_parser = parse_beam)]
    beam: BeamWidth,
    #[arg(long, default_value = "5", value_parser = parse_rays)]
    rays: RayCount,
    /// Only run scenarios of these profiles (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_profile)]
    profile: Vec<Profile>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn flags(&self) -> RunFlags {
        RunFlags {
            workers: self.workers as usize,
            cap: self.cap,
            beam: self.beam,
            rays: self.rays,
            profiles: self.profile.clone(),
        }
    }

    fn out(&self) -> &Path {
        self.out.as_deref().unwrap_or(&self.cohort)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded synthetic cohort and its manifest.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scenarios per profile.
        #[arg(long, default_value_t = 31)]
        n: usize,
        /// Profiles to generate (comma separated); all by default.
        #[arg(long, value_delimiter = ',', value_parser = parse_profile)]
        profile: Vec<Profile>,
        #[arg(long)]
        out: PathBuf,
        /// Target path length bounds in metres.
        #[arg(long, default_value_t = 150.0)]
        min_length: f64,
        #[arg(long, default_value_t = 400.0)]
        max_length: f64,
    },
    /// Baseline (B0) against TA* (B4) under the same cap.
    Compare(Common),
    /// All five variants B0-B4, checking cache transparency.
    Ablate(Common),
    /// Beam-width and ray-count sweep against exact TA*.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Extra beam widths, crossed with `--ray-counts`.
        #[arg(long, value_delimiter = ',', value_parser = parse_beam)]
        beams: Vec<BeamWidth>,
        #[arg(long, value_delimiter = ',', value_parser = parse_rays)]
        ray_counts: Vec<RayCount>,
    },
    /// Replay a trajectory file against a scenario and print the metrics.
    Replay {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the summary CSVs from persisted records.
    ReportData {
        #[arg(long)]
        cohort: PathBuf,
        /// Defaults to `<cohort>/summary`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    Profile::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Profile::ALL.iter().map(|p| p.name()).collect();
        format!("unknown profile {s:?}; expected one of {}", names.join(", "))
    })
}

fn finish(o: commands::Outcome) -> Result<ExitCode> {
    for (name, text) in &o.tables {
        println!("== {name}\n{text}");
    }
    if o.failures.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!("{} failure(s):", o.failures.len());
    for f in &o.failures {
        eprintln!("  {f}");
    }
    Ok(ExitCode::FAILURE)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Generate { seed, n, profile, out, min_length, max_length } => {
            if !(min_length > 0.0 && min_length <= max_length) {
                bail!("need 0 < --min-length <= --max-length");
            }
            let profiles = if profile.is_empty() { Profile::ALL.to_vec() } else { profile };
            let opts = CohortOptions { length_range: (min_length, max_length), ..CohortOptions::default() };
            let m = commands::cmd_generate(seed, n, &profiles, &opts, &out).context("generate")?;
            println!("wrote {} scenario(s) to {}", m.scenarios.len(), out.join("scenarios").display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Compare(c) => finish(commands::cmd_compare(&c.cohort, c.out(), &c.flags()).context("compare")?),
        Cmd::Ablate(c) => finish(commands::cmd_ablate(&c.cohort, c.out(), &c.flags()).context("ablate")?),
        Cmd::Sweep { common: c, beams, ray_counts } => {
            let rays = if ray_counts.is_empty() && !beams.is_empty() { vec![c.rays] } else { ray_counts };
            let beams = if beams.is_empty() && !rays.is_empty() { vec![c.beam] } else { beams };
            let configs = commands::sweep_configs(&rays, &beams);
            finish(commands::cmd_sweep(&c.cohort, c.out(), &c.flags(), c.seed, &configs).context("sweep")?)
        }
        Cmd::Replay { trajectory, scenario, out } => {
            let r = commands::cmd_replay(&trajectory, &scenario).context("replay")?;
            let text = serde_json::to_string_pretty(&r)? + "\n";
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ReportData { cohort, out } => {
            let out = out.unwrap_or_else(|| cohort.join("summary"));
            let tables = commands::cmd_report_data(&cohort, &out).context("report-data")?;
            for (name, text) in &tables {
                println!("== {name}\n{text}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
