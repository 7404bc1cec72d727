//! Elliptic Kepler equation and anomaly conversions.

use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

const NEWTON_MAX_ITER: usize = 50;
const BISECTION_MAX_ITER: usize = 200;
const TOLERANCE: f64 = 1e-13;

/// Wraps an angle to `[0, 2π)`.
pub fn wrap_two_pi(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_pi(angle: f64) -> f64 {
    let w = wrap_two_pi(angle);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Solves `E - e sin E = M` for the eccentric anomaly, `0 <= e < 1`.
///
/// `M` is wrapped to `[0, 2π)` first and the returned `E` lies in the same
/// interval. Newton iteration is tried first; if it stalls the root is
/// bracketed in `[0, 2π]` and bisected.
pub fn solve_kepler(mean_anom: f64, e: f64) -> Result<f64> {
    if !mean_anom.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite mean anomaly {mean_anom}"
        )));
    }
    if !(0.0..1.0).contains(&e) {
        return Err(Error::UnsupportedOrbit(format!(
            "Kepler solver requires 0 <= e < 1, got {e}"
        )));
    }
    let m = wrap_two_pi(mean_anom);
    let residual = |ea: f64| ea - e * ea.sin() - m;

    let mut ea = if e < 0.8 { m } else { PI };
    for _ in 0..NEWTON_MAX_ITER {
        let f = residual(ea);
        let step = f / (1.0 - e * ea.cos());
        ea -= step;
        if step.abs() < TOLERANCE {
            if residual(ea).abs() < 1e-12 && (0.0..=TAU).contains(&ea) {
                return Ok(ea.clamp(0.0, TAU));
            }
            break;
        }
    }

    // f(0) = -M <= 0 and f(2π) = 2π - M > 0, and f is monotone.
    let (mut lo, mut hi) = (0.0_f64, TAU);
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let ea = 0.5 * (lo + hi);
    let r = residual(ea);
    if r.abs() < 1e-12 {
        Ok(ea)
    } else {
        Err(Error::SolverFailure(format!(
            "Kepler equation did not converge (M={mean_anom}, e={e}, residual={r:e})"
        )))
    }
}

pub fn true_to_eccentric(nu: f64, e: f64) -> f64 {
    let half = 0.5 * nu;
    2.0 * ((1.0 - e).sqrt() * half.sin()).atan2((1.0 + e).sqrt() * half.cos())
}

pub fn eccentric_to_true(ea: f64, e: f64) -> f64 {
    let half = 0.5 * ea;
    2.0 * ((1.0 + e).sqrt() * half.sin()).atan2((1.0 - e).sqrt() * half.cos())
}

pub fn eccentric_to_mean(ea: f64, e: f64) -> f64 {
    ea - e * ea.sin()
}
