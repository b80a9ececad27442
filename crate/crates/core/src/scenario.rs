//! One planning problem: target trajectory, obstacles, start, overrides.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::config::ParamOverrides;
use crate::geometry::{GeometryError, ObstacleBox, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct TargetTrajectory {
    /// `p_0 ..= p_T`, one per layer.
    pub waypoints: Vec<Vec3>,
    pub dt: f64,
}

impl TargetTrajectory {
    pub fn new(waypoints: Vec<Vec3>, dt: f64) -> Result<Self, ScenarioError> {
        let t = TargetTrajectory { waypoints, dt };
        t.validate(None)?;
        Ok(t)
    }

    /// Number of layers after the start layer (`T`).
    pub fn horizon(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn max_speed(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1]) / self.dt).fold(0.0, f64::max)
    }

    pub fn validate(&self, max_speed: Option<f64>) -> Result<(), ScenarioError> {
        if self.waypoints.len() < 2 {
            return Err(ScenarioError::TooFewWaypoints(self.waypoints.len()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ScenarioError::InvalidDt(self.dt));
        }
        if let Some(i) = self.waypoints.iter().position(|p| !p.is_finite()) {
            return Err(ScenarioError::NonFiniteWaypoint(i));
        }
        if let Some(bound) = max_speed {
            let v = self.max_speed();
            if v > bound {
                return Err(ScenarioError::TargetTooFast { speed: v, bound });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub seed: u64,
    pub target: TargetTrajectory,
    pub obstacles: Vec<ObstacleBox>,
    pub start: Vec3,
    pub params: ParamOverrides,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.target.validate(None)?;
        if !self.start.is_finite() {
            return Err(ScenarioError::NonFiniteStart);
        }
        for b in &self.obstacles {
            b.validate().map_err(ScenarioError::Obstacle)?;
        }
        Ok(())
    }

    /// Profile label: the id up to its last `.`.
    pub fn profile(&self) -> &str {
        profile_of(&self.id)
    }
}

pub fn profile_of(id: &str) -> &str {
    match id.rfind('.') {
        Some(i) => &id[..i],
        None => id,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioError {
    TooFewWaypoints(usize),
    InvalidDt(f64),
    NonFiniteWaypoint(usize),
    NonFiniteStart,
    TargetTooFast { speed: f64, bound: f64 },
    Obstacle(GeometryError),
    NoFeasibleStart,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::TooFewWaypoints(n) => write!(f, "target needs at least 2 waypoints, got {n}"),
            ScenarioError::InvalidDt(dt) => write!(f, "dt must be positive, got {dt}"),
            ScenarioError::NonFiniteWaypoint(i) => write!(f, "target waypoint {i} is not finite"),
            ScenarioError::NonFiniteStart => write!(f, "start is not finite"),
            ScenarioError::TargetTooFast { speed, bound } => {
                write!(f, "target speed {speed:.3} m/s exceeds bound {bound:.3} m/s")
            }
            ScenarioError::Obstacle(e) => write!(f, "invalid obstacle: {e}"),
            ScenarioError::NoFeasibleStart => write!(f, "no feasible start within 10 voxels of the nominal start"),
        }
    }
}

impl core::error::Error for ScenarioError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn trajectory_validation() {
        assert!(matches!(TargetTrajectory::new(vec![Vec3::ZERO], 0.5), Err(ScenarioError::TooFewWaypoints(1))));
        assert!(matches!(TargetTrajectory::new(vec![Vec3::ZERO, Vec3::X], 0.0), Err(ScenarioError::InvalidDt(_))));
        let t = TargetTrajectory::new(vec![Vec3::ZERO, Vec3::new(0.7, 0.0, 0.0)], 0.5).unwrap();
        assert!((t.max_speed() - 1.4).abs() < 1e-12);
        assert!(t.validate(Some(1.4 + 1e-9)).is_ok());
        assert!(t.validate(Some(1.0)).is_err());
    }

    #[test]
    fn profile_from_id() {
        assert_eq!(profile_of("urban-dense.0003"), "urban-dense");
        assert_eq!(profile_of("plain"), "plain");
    }
}
