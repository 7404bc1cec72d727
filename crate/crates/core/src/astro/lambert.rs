//! Single-revolution Lambert solver in universal variables.
//!
//! The time of flight is written as a function of the universal variable
//! `z = ψ²` through the Stumpff functions `C(z)` and `S(z)`; on the
//! admissible branch it increases monotonically from zero to infinity as
//! `z` approaches `4π²`, so the root is found by bracketing and bisection.

use std::f64::consts::{PI, TAU};

use super::{CentralBody, Vector3};
use crate::{Error, Result};

const Z_MAX: f64 = 4.0 * PI * PI;
const Z_FLOOR: f64 = -1.0e5;
/// Transfer angles this close to 0, π or 2π are rejected.
const ANGLE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambertSolution {
    /// Departure velocity at `r0`, km/s.
    pub v0: Vector3,
    /// Arrival velocity at `r1`, km/s.
    pub v1: Vector3,
    /// Transfer angle, rad.
    pub transfer_angle: f64,
}

fn stumpff(z: f64) -> (f64, f64) {
    if z > 1e-3 {
        let s = z.sqrt();
        ((1.0 - s.cos()) / z, (s - s.sin()) / (s * s * s))
    } else if z < -1e-3 {
        let s = (-z).sqrt();
        ((s.cosh() - 1.0) / -z, (s.sinh() - s) / (s * s * s))
    } else {
        // series to z^4 keeps the truncation error below 1e-17
        let c = 1.0 / 2.0 - z / 24.0 + z * z / 720.0 - z * z * z / 40_320.0
            + z * z * z * z / 3_628_800.0;
        let s = 1.0 / 6.0 - z / 120.0 + z * z / 5_040.0 - z * z * z / 362_880.0
            + z * z * z * z / 39_916_800.0;
        (c, s)
    }
}

struct Geometry {
    r0: f64,
    r1: f64,
    a: f64,
    sqrt_mu: f64,
}

impl Geometry {
    fn y(&self, z: f64) -> f64 {
        let (c, s) = stumpff(z);
        self.r0 + self.r1 + self.a * (z * s - 1.0) / c.sqrt()
    }

    /// Time of flight at `z`, or `None` where `y(z) < 0`.
    fn tof(&self, z: f64) -> Option<f64> {
        let (c, s) = stumpff(z);
        let y = self.r0 + self.r1 + self.a * (z * s - 1.0) / c.sqrt();
        if y < 0.0 {
            return None;
        }
        let x = (y / c).sqrt();
        Some((x * x * x * s + self.a * y.sqrt()) / self.sqrt_mu)
    }
}

/// Finds the velocities of the single-revolution conic from `r0` to `r1` in
/// `dt` seconds. `prograde` selects the transfer whose angular momentum has a
/// non-negative z component.
pub fn lambert(
    r0: &Vector3,
    r1: &Vector3,
    dt: f64,
    body: &CentralBody,
    prograde: bool,
) -> Result<LambertSolution> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!(
            "Lambert time of flight must be positive, got {dt}"
        )));
    }
    let (r0n, r1n) = (r0.norm(), r1.norm());
    if !(r0n > 0.0 && r1n > 0.0) {
        return Err(Error::InvalidInput(
            "Lambert endpoints must be away from the origin".into(),
        ));
    }
    let cos_dnu = (r0.dot(r1) / (r0n * r1n)).clamp(-1.0, 1.0);
    let cross_z = r0.cross(r1).z;
    let mut dnu = cos_dnu.acos();
    if (prograde && cross_z < 0.0) || (!prograde && cross_z >= 0.0) {
        dnu = TAU - dnu;
    }
    if dnu < ANGLE_TOL || TAU - dnu < ANGLE_TOL || (dnu - PI).abs() < ANGLE_TOL {
        return Err(Error::SolverFailure(format!(
            "transfer angle {:.3e} rad is singular (endpoints collinear); plane undefined",
            dnu
        )));
    }
    let g = Geometry {
        r0: r0n,
        r1: r1n,
        a: dnu.sin() * (r0n * r1n / (1.0 - cos_dnu)).sqrt(),
        sqrt_mu: body.mu.sqrt(),
    };

    // lower end of the admissible branch
    let mut lo = -Z_MAX;
    if g.a > 0.0 {
        // y(z) increases with z: locate y = 0, below which the branch is void
        while g.y(lo) > 0.0 {
            lo *= 2.0;
            if lo < Z_FLOOR {
                return Err(Error::SolverFailure("could not bracket y(z) = 0".into()));
            }
        }
        let mut hi = Z_MAX;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g.y(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo = hi;
    } else {
        while g.tof(lo).is_some_and(|t| t > dt) {
            lo *= 2.0;
            if lo < Z_FLOOR {
                return Err(Error::SolverFailure(format!(
                    "time of flight {dt} s is shorter than any single-revolution transfer"
                )));
            }
        }
    }

    let mut hi = Z_MAX;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match g.tof(mid) {
            Some(t) if t <= dt => lo = mid,
            Some(_) => hi = mid,
            None => lo = mid,
        }
    }
    let z = 0.5 * (lo + hi);
    let tof = g
        .tof(z)
        .ok_or_else(|| Error::SolverFailure("Lambert root left the admissible branch".into()))?;
    if !((tof - dt).abs() <= 1e-9 * dt.max(1.0)) {
        return Err(Error::SolverFailure(format!(
            "no single-revolution Lambert solution (dt={dt} s, best tof={tof} s, z={z})"
        )));
    }

    let y = g.y(z);
    let f = 1.0 - y / r0n;
    let gg = g.a * (y / body.mu).sqrt();
    let gdot = 1.0 - y / r1n;
    let v0 = (r1 - r0 * f) / gg;
    let v1 = (r1 * gdot - r0) / gg;
    Ok(LambertSolution {
        v0,
        v1,
        transfer_angle: dnu,
    })
}
