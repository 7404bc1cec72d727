//! Collision scenarios: the three orbits, the time window and the
//! uncertainty model, plus their JSON file format.

mod file;
mod generate;

use serde::{Deserialize, Serialize};

use crate::astro::{CentralBody, Epoch, KeplerianElements};
use crate::conjunction::CovarianceSpec;
use crate::{Error, Result};

pub use file::{
    read_scenario, scenario_from_json, scenario_to_json, write_scenario, SCENARIO_SCHEMA_VERSION,
};
pub use generate::{
    case_study_conjunction_scenario, case_study_scenario, make_collision_scenario,
    random_conjunction_spec, random_scenario, CASE_STUDY_END_UTC, CASE_STUDY_START_UTC,
};

/// Geometry of a synthetic collision, as seen at the time of collision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjunctionSpec {
    /// Time from scenario start to collision, s.
    #[serde(rename = "dt_tca_s")]
    pub dt_tca: f64,
    /// Angle between target and debris velocity at collision, rad.
    #[serde(rename = "approach_angle_rad")]
    pub approach_angle: f64,
    /// |v_debris| / |v_target| at collision.
    pub vel_ratio: f64,
    /// Servicer true-anomaly lead over the target at start, rad.
    #[serde(rename = "phase_offset_rad")]
    pub phase_offset: f64,
}

impl ConjunctionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_tca > 0.0 && self.dt_tca.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dt_tca must be positive, got {}",
                self.dt_tca
            )));
        }
        if !(self.vel_ratio > 0.0 && self.vel_ratio.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "vel_ratio must be positive, got {}",
                self.vel_ratio
            )));
        }
        if !self.approach_angle.is_finite() || !self.phase_offset.is_finite() {
            return Err(Error::InvalidInput("non-finite conjunction angle".into()));
        }
        Ok(())
    }
}

/// Where a scenario came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjunction: Option<ConjunctionSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    /// Endangered satellite.
    pub target: KeplerianElements,
    pub servicer: KeplerianElements,
    pub debris: KeplerianElements,
    pub start: Epoch,
    pub end: Epoch,
    /// ΔV budget in m/s (one unit per m/s).
    pub fuel_capacity: f64,
    pub cov: CovarianceSpec,
    /// Expected time of closest approach between target and debris.
    pub tca_hint: Epoch,
    pub body: CentralBody,
    pub provenance: Provenance,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.start >= self.end {
            return Err(Error::InvalidInput(format!(
                "scenario start {} must precede end {}",
                self.start, self.end
            )));
        }
        self.target.validate()?;
        self.servicer.validate()?;
        self.debris.validate()?;
        if !(self.fuel_capacity > 0.0 && self.fuel_capacity.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "fuel capacity must be positive, got {}",
                self.fuel_capacity
            )));
        }
        self.cov.validate()?;
        CentralBody::new(self.body.mu, self.body.radius)?;
        Ok(())
    }

    pub fn duration_seconds(&self) -> f64 {
        self.end.seconds_since(self.start)
    }

    pub fn contains(&self, t: Epoch) -> bool {
        self.start <= t && t <= self.end
    }
}
