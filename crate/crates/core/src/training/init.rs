//! Starting tables for training.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::astro::{lambert, Epoch, KeplerOrbit, Vector3};
use crate::environment::{ActionTable, Maneuver};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// A ballistic servicer that arrives within this distance (km) of the
/// target needs no transfer.
const ARRIVAL_TOL_KM: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitBounds {
    /// Random burns have components uniform in ±this, m/s.
    #[serde(rename = "dv_max_mps")]
    pub dv_max: f64,
}

impl Default for InitBounds {
    fn default() -> Self {
        InitBounds { dv_max: 2.0 }
    }
}

impl InitBounds {
    pub fn validate(&self) -> Result<()> {
        if self.dv_max >= 0.0 && self.dv_max.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "dv_max must be finite and ≥ 0, got {}",
                self.dv_max
            )))
        }
    }
}

fn random_dv(rng: &mut ChaCha8Rng, dv_max: f64) -> Vector3 {
    if dv_max == 0.0 {
        return Vector3::zeros();
    }
    Vector3::from_fn(|_, _| rng.random_range(-dv_max..=dv_max))
}

/// `n` sorted epochs uniform in `[t0, t1]`.
fn random_times(rng: &mut ChaCha8Rng, t0: Epoch, t1: Epoch, n: usize) -> Vec<Epoch> {
    let span = t1.seconds_since(t0);
    let mut ts: Vec<Epoch> = (0..n)
        .map(|_| t0.add_seconds(span * rng.random::<f64>()))
        .collect();
    ts.sort();
    ts
}

/// Four random burns; times are drawn over the window and sorted, which
/// keeps the docking rows ahead of the avoidance rows.
pub fn init_random(scenario: &Scenario, bounds: &InitBounds, seed: u64) -> Result<ActionTable> {
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times = random_times(&mut rng, scenario.start, scenario.end, 4);
    let mut rows = [Maneuver::new(Vector3::zeros(), scenario.start); 4];
    for (row, t) in rows.iter_mut().zip(times) {
        *row = Maneuver::new(random_dv(&mut rng, bounds.dv_max), t);
    }
    Ok(ActionTable::new(rows))
}

/// Docking rows from a Lambert transfer that leaves the servicer orbit at
/// `t1` and matches the target at `t2`; avoidance rows random in `[t2, end]`.
pub fn init_lambert(
    scenario: &Scenario,
    t1: Epoch,
    t2: Epoch,
    bounds: &InitBounds,
    seed: u64,
) -> Result<ActionTable> {
    bounds.validate()?;
    if !(t1 < t2) || !scenario.contains(t1) || !scenario.contains(t2) {
        return Err(Error::InvalidInput(format!(
            "Lambert epochs must satisfy start ≤ t1 < t2 ≤ end, got t1={t1}, t2={t2}"
        )));
    }
    let body = scenario.body;
    let servicer = KeplerOrbit::from_elements(&scenario.servicer, &body)?;
    let target = KeplerOrbit::from_elements(&scenario.target, &body)?;
    let s1 = servicer.state_at(t1)?;
    let s2 = servicer.state_at(t2)?;
    let p2 = target.state_at(t2)?;

    let (dv1, arrival_v) = if (s2.r - p2.r).norm() < ARRIVAL_TOL_KM {
        (Vector3::zeros(), s2.v)
    } else {
        let sol = lambert(&s1.r, &p2.r, t2.seconds_since(t1), &body, true)?;
        (sol.v0 - s1.v, sol.v1)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cam = random_times(&mut rng, t2, scenario.end, 2);
    Ok(ActionTable::new([
        Maneuver::new(dv1 * 1000.0, t1),
        Maneuver::new((p2.v - arrival_v) * 1000.0, t2),
        Maneuver::new(random_dv(&mut rng, bounds.dv_max), cam[0]),
        Maneuver::new(random_dv(&mut rng, bounds.dv_max), cam[1]),
    ]))
}
