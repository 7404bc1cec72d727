//! Conjunction screening: closest approach, encounter-plane geometry and
//! short-encounter collision probability.

mod encounter;
mod probability;
mod tca;

use serde::{Deserialize, Serialize};

use crate::astro::Epoch;
use crate::{Error, Result};

pub use encounter::{project_encounter_plane, EncounterPlane, Matrix2, Vector2};
pub use probability::collision_probability;
pub use tca::{closest_approaches, find_tca, find_tca_orbits, ClosestApproach, TcaSearch};

/// Position uncertainty of the two objects and their combined hard-body
/// radius. Standard deviations are per axis of each object's own
/// radial/transverse/normal frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    #[serde(rename = "sigma_primary_rtn_km")]
    pub sigma_primary: [f64; 3],
    #[serde(rename = "sigma_secondary_rtn_km")]
    pub sigma_secondary: [f64; 3],
    #[serde(rename = "combined_radius_km")]
    pub combined_radius: f64,
}

impl CovarianceSpec {
    pub fn isotropic(sigma: f64, combined_radius: f64) -> Self {
        CovarianceSpec {
            sigma_primary: [sigma; 3],
            sigma_secondary: [sigma; 3],
            combined_radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self
            .sigma_primary
            .iter()
            .chain(self.sigma_secondary.iter())
            .all(|s| *s > 0.0 && s.is_finite())
            && self.combined_radius > 0.0
            && self.combined_radius.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "covariance spec needs positive sigmas and radius: {self:?}"
            )))
        }
    }
}

impl Default for CovarianceSpec {
    /// 100 m per axis per object, 10 m combined radius.
    fn default() -> Self {
        Self::isotropic(0.1, 0.01)
    }
}

/// One assessed close approach.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjunctionEvent {
    pub tca: Epoch,
    /// km
    pub miss_distance: f64,
    /// km/s
    pub rel_speed: f64,
    pub pc: f64,
    pub miss_vector_2d: Vector2,
    pub cov_2d: Matrix2,
}

/// Projects an approach into the encounter plane and evaluates its
/// collision probability.
pub fn assess(approach: &ClosestApproach, cov: &CovarianceSpec) -> Result<ConjunctionEvent> {
    let plane = project_encounter_plane(&approach.state_a, &approach.state_b, cov)?;
    let pc = collision_probability(&plane.miss_2d, &plane.cov_2d, cov.combined_radius)?;
    Ok(ConjunctionEvent {
        tca: approach.tca,
        miss_distance: approach.miss_distance,
        rel_speed: approach.rel_speed,
        pc,
        miss_vector_2d: plane.miss_2d,
        cov_2d: plane.cov_2d,
    })
}
