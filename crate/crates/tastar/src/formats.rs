//! On-disk formats: scenario JSON, the cohort manifest and trajectory files.
//!
//! Scenario JSON (field order is fixed):
//!
//! ```json
//! {"id": "urban-dense.0003", "seed": 1234, "dt": 0.5,
//!  "target": [[x, y, z], ...], "start": [x, y, z],
//!  "obstacles": [{"center": [..], "half_extents": [..], "yaw": 0.0, "class": "Building"}],
//!  "params": {"d_cam_max": 100.0}}
//! ```
//!
//! `params` holds optional planner overrides and is omitted when empty.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tastar_core::{ObstacleBox, ParamOverrides, Scenario, TargetTrajectory, Vec3};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleJson {
    pub center: [f64; 3],
    pub half_extents: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
    #[serde(default, rename = "class")]
    pub class_label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_path: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_trk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_vis: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_safe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_sm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dxy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_behind: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_i: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_safe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_cam_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_cam_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "V_min")]
    pub v_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corridor_half_width: Option<f64>,
}

macro_rules! convert_params {
    ($($f:ident),*) => {
        impl From<&ParamOverrides> for ParamsJson {
            fn from(p: &ParamOverrides) -> Self {
                ParamsJson { $($f: p.$f),* }
            }
        }
        impl From<&ParamsJson> for ParamOverrides {
            fn from(p: &ParamsJson) -> Self {
                ParamOverrides { $($f: p.$f),* }
            }
        }
    };
}

convert_params!(
    w_path, w_trk, w_vis, w_safe, w_sm, dt, dxy, dz, d_behind, z_ref, d_i, d_safe, d_cam_min, d_cam_max, v_max, v_min,
    z_min, z_max, corridor_half_width
);

impl ParamsJson {
    fn is_empty(&self) -> bool {
        *self == ParamsJson::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioJson {
    pub id: String,
    pub seed: u64,
    pub dt: f64,
    pub target: Vec<[f64; 3]>,
    pub start: [f64; 3],
    pub obstacles: Vec<ObstacleJson>,
    #[serde(default, skip_serializing_if = "ParamsJson::is_empty")]
    pub params: ParamsJson,
}

impl From<&Scenario> for ScenarioJson {
    fn from(s: &Scenario) -> Self {
        ScenarioJson {
            id: s.id.clone(),
            seed: s.seed,
            dt: s.target.dt,
            target: s.target.waypoints.iter().map(|p| p.to_array()).collect(),
            start: s.start.to_array(),
            obstacles: s
                .obstacles
                .iter()
                .map(|b| ObstacleJson {
                    center: b.center.to_array(),
                    half_extents: b.half_extents.to_array(),
                    yaw: b.yaw,
                    class_label: b.class_label.clone(),
                })
                .collect(),
            params: ParamsJson::from(&s.params),
        }
    }
}

impl TryFrom<ScenarioJson> for Scenario {
    type Error = Error;

    fn try_from(j: ScenarioJson) -> Result<Self, Error> {
        let target = TargetTrajectory::new(j.target.into_iter().map(Vec3::from_array).collect(), j.dt)?;
        let obstacles = j
            .obstacles
            .into_iter()
            .map(|o| ObstacleBox::new(Vec3::from_array(o.center), Vec3::from_array(o.half_extents), o.yaw, o.class_label))
            .collect::<Result<Vec<_>, _>>()?;
        let s = Scenario {
            id: j.id,
            seed: j.seed,
            target,
            obstacles,
            start: Vec3::from_array(j.start),
            params: ParamOverrides::from(&j.params),
        };
        s.validate()?;
        Ok(s)
    }
}

pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string(&ScenarioJson::from(s)).expect("scenario serializes")
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, Error> {
    let j: ScenarioJson = serde_json::from_str(text)?;
    Scenario::try_from(j)
}

pub fn read_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scenario_from_json(&text).map_err(|e| e.context(path))
}

pub fn write_scenario(path: &Path, s: &Scenario) -> Result<(), Error> {
    let mut text = scenario_to_json(s);
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `scenarios/manifest.json`: what a cohort directory is supposed to contain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub profiles: Vec<String>,
    pub per_profile: usize,
    pub length_range: [f64; 2],
    pub scenarios: Vec<String>,
}

/// Paths inside a cohort directory.
#[derive(Clone, Debug)]
pub struct CohortDir {
    pub root: PathBuf,
}

impl CohortDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CohortDir { root: root.into() }
    }

    pub fn scenarios(&self) -> PathBuf {
        self.root.join("scenarios")
    }

    pub fn scenario(&self, id: &str) -> PathBuf {
        self.scenarios().join(format!("{id}.json"))
    }

    pub fn manifest(&self) -> PathBuf {
        self.scenarios().join("manifest.json")
    }

    pub fn results(&self, variant: &str) -> PathBuf {
        self.root.join("results").join(variant)
    }

    pub fn records(&self, variant: &str) -> PathBuf {
        self.results(variant).join("records.jsonl")
    }

    pub fn summary(&self) -> PathBuf {
        self.root.join("summary")
    }

    pub fn read_manifest(&self) -> Result<Manifest, Error> {
        let p = self.manifest();
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).context(&p))
    }

    /// Loads every scenario the manifest lists, in manifest order. Fails with
    /// the full list of missing files if any are absent.
    pub fn load(&self) -> Result<Vec<Scenario>, Error> {
        let m = self.read_manifest()?;
        let missing: Vec<String> = m.scenarios.iter().filter(|id| !self.scenario(id).is_file()).cloned().collect();
        if !missing.is_empty() {
            return Err(Error::MissingScenarios(missing));
        }
        m.scenarios.iter().map(|id| read_scenario(&self.scenario(id))).collect()
    }
}

/// A trajectory file for `replay`: either a bare `[[x, y, z], ...]` array or
/// any object with a `"trajectory"` array (run records qualify).
pub fn read_trajectory(path: &Path) -> Result<Vec<Vec3>, Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        Bare(Vec<[f64; 3]>),
        Wrapped { trajectory: Vec<[f64; 3]> },
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let form: Form = serde_json::from_str(&text).map_err(|e| Error::from(e).context(path))?;
    let pts = match form {
        Form::Bare(p) | Form::Wrapped { trajectory: p } => p,
    };
    Ok(pts.into_iter().map(Vec3::from_array).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tastar_core::generator::{generate_synthetic_cohort, CohortOptions, Profile};

    #[test]
    fn round_trip_and_field_order() {
        let opts = CohortOptions { length_range: (30.0, 40.0), ..Default::default() };
        for p in [Profile::UrbanDense, Profile::PocketMaze] {
            let s = &generate_synthetic_cohort(3, 1, p, &opts).unwrap()[0];
            let text = scenario_to_json(s);
            let back = scenario_from_json(&text).unwrap();
            assert_eq!(&back, s);
            let keys = ["\"id\"", "\"seed\"", "\"dt\"", "\"target\"", "\"start\"", "\"obstacles\""];
            let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
            assert!(pos.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(text.contains("\"params\""), !s.params.is_empty());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad = r#"{"id":"x.0","seed":0,"dt":0.5,"target":[[0,0,0]],"start":[0,0,22],"obstacles":[]}"#;
        assert!(scenario_from_json(bad).is_err());
        let bad_box = r#"{"id":"x.0","seed":0,"dt":0.5,"target":[[0,0,0],[0.7,0,0]],"start":[0,0,22],
            "obstacles":[{"center":[0,0,0],"half_extents":[1,0,1],"yaw":0,"class":"b"}]}"#;
        assert!(scenario_from_json(bad_box).is_err());
        let unknown = r#"{"id":"x.0","seed":0,"dt":0.5,"target":[[0,0,0],[0.7,0,0]],"start":[0,0,22],
            "obstacles":[],"params":{"beam":3}}"#;
        assert!(scenario_from_json(unknown).is_err());
    }
}
