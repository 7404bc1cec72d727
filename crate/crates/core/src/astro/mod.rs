//! Two-body Keplerian astrodynamics in a single Earth-centred inertial frame.

mod elements;
mod epoch;
pub mod kepler;
mod lambert;
mod orbit;

use serde::{Deserialize, Serialize};

pub use elements::{elements_to_state, state_to_elements, CartesianState, KeplerianElements};
pub use epoch::{Epoch, SECONDS_PER_DAY};
pub use kepler::solve_kepler;
pub use lambert::{lambert, LambertSolution};
pub use orbit::{orbital_period, propagate, KeplerOrbit};

pub type Vector3 = nalgebra::Vector3<f64>;

/// Earth gravitational parameter, km³/s².
pub const MU_EARTH: f64 = 398_600.441_8;
/// Earth equatorial radius, km.
pub const EARTH_RADIUS: f64 = 6_378.137;

/// Angles below this are treated as zero when choosing element conventions.
pub(crate) const SINGULAR_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralBody {
    #[serde(rename = "mu_km3_s2")]
    pub mu: f64,
    #[serde(rename = "radius_km")]
    pub radius: f64,
}

impl CentralBody {
    pub const EARTH: CentralBody = CentralBody {
        mu: MU_EARTH,
        radius: EARTH_RADIUS,
    };

    pub fn new(mu: f64, radius: f64) -> crate::Result<Self> {
        if mu > 0.0 && radius > 0.0 && mu.is_finite() && radius.is_finite() {
            Ok(CentralBody { mu, radius })
        } else {
            Err(crate::Error::InvalidInput(format!(
                "central body needs mu > 0 and radius > 0 (mu={mu}, radius={radius})"
            )))
        }
    }
}

impl Default for CentralBody {
    fn default() -> Self {
        Self::EARTH
    }
}
