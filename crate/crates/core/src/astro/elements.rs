use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kepler::wrap_two_pi;
use super::{CentralBody, Epoch, Vector3, SINGULAR_TOL};
use crate::{Error, Result};

/// Classical elements of an elliptic orbit. Angles are radians in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeplerianElements {
    #[serde(rename = "a_km")]
    pub a: f64,
    pub e: f64,
    #[serde(rename = "i_rad")]
    pub i: f64,
    #[serde(rename = "raan_rad")]
    pub raan: f64,
    #[serde(rename = "argp_rad")]
    pub argp: f64,
    #[serde(rename = "true_anom_rad")]
    pub true_anom: f64,
    #[serde(rename = "epoch_mjd2000")]
    pub epoch: Epoch,
}

impl KeplerianElements {
    /// Builds an element set, normalizing every angle to `[0, 2π)`.
    pub fn new(
        a: f64,
        e: f64,
        i: f64,
        raan: f64,
        argp: f64,
        true_anom: f64,
        epoch: Epoch,
    ) -> Result<Self> {
        let el = KeplerianElements {
            a,
            e,
            i: wrap_two_pi(i),
            raan: wrap_two_pi(raan),
            argp: wrap_two_pi(argp),
            true_anom: wrap_two_pi(true_anom),
            epoch,
        };
        el.validate()?;
        Ok(el)
    }

    /// Same as [`KeplerianElements::new`] with angles in degrees.
    pub fn from_degrees(
        a: f64,
        e: f64,
        i: f64,
        raan: f64,
        argp: f64,
        true_anom: f64,
        epoch: Epoch,
    ) -> Result<Self> {
        Self::new(
            a,
            e,
            i.to_radians(),
            raan.to_radians(),
            argp.to_radians(),
            true_anom.to_radians(),
            epoch,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let angles = [self.i, self.raan, self.argp, self.true_anom];
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::UnsupportedOrbit(format!(
                "semi-major axis must be positive, got {}",
                self.a
            )));
        }
        if !(0.0..1.0).contains(&self.e) {
            return Err(Error::UnsupportedOrbit(format!(
                "only elliptic orbits are supported, e = {}",
                self.e
            )));
        }
        if angles.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite orbital angle".into()));
        }
        Ok(())
    }

    pub fn semi_latus_rectum(&self) -> f64 {
        self.a * (1.0 - self.e * self.e)
    }

    /// Perifocal-to-inertial rotation columns: periapsis direction and its
    /// in-plane normal.
    pub(crate) fn perifocal_axes(&self) -> (Vector3, Vector3) {
        let (so, co) = self.raan.sin_cos();
        let (si, ci) = self.i.sin_cos();
        let (sw, cw) = self.argp.sin_cos();
        let p = Vector3::new(co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si);
        let q = Vector3::new(-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si);
        (p, q)
    }
}

/// Inertial position (km) and velocity (km/s) at an epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianState {
    pub r: Vector3,
    pub v: Vector3,
    pub epoch: Epoch,
}

impl CartesianState {
    pub fn new(r: Vector3, v: Vector3, epoch: Epoch) -> Self {
        CartesianState { r, v, epoch }
    }

    pub fn specific_energy(&self, body: &CentralBody) -> f64 {
        0.5 * self.v.norm_squared() - body.mu / self.r.norm()
    }

    pub fn angular_momentum(&self) -> Vector3 {
        self.r.cross(&self.v)
    }
}

pub fn elements_to_state(el: &KeplerianElements, body: &CentralBody) -> CartesianState {
    let p = el.semi_latus_rectum();
    let (sn, cn) = el.true_anom.sin_cos();
    let radius = p / (1.0 + el.e * cn);
    let vscale = (body.mu / p).sqrt();
    let (pa, qa) = el.perifocal_axes();
    let r = pa * (radius * cn) + qa * (radius * sn);
    let v = pa * (-vscale * sn) + qa * (vscale * (el.e + cn));
    CartesianState::new(r, v, el.epoch)
}

/// Signed angle from `from` to `to` measured about the unit axis `axis`.
pub(crate) fn signed_angle(from: &Vector3, to: &Vector3, axis: &Vector3) -> f64 {
    from.cross(to).dot(axis).atan2(from.dot(to))
}

/// Converts an elliptic state into classical elements.
///
/// Conventions for singular geometry: when `e < 1e-11` the argument of
/// periapsis is set to zero and the true anomaly is measured from the
/// ascending node; when the orbit is equatorial (`sin i < 1e-11`) the node is
/// set to zero and angles are measured from the inertial x axis.
pub fn state_to_elements(st: &CartesianState, body: &CentralBody) -> Result<KeplerianElements> {
    let r = st.r;
    let v = st.v;
    let rn = r.norm();
    if !(rn > 0.0) || !rn.is_finite() || !v.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput(
            "degenerate or non-finite state vector".into(),
        ));
    }
    let energy = st.specific_energy(body);
    if energy >= 0.0 {
        return Err(Error::UnsupportedOrbit(format!(
            "state is not elliptic (specific energy {energy:e} km²/s²)"
        )));
    }
    let h = r.cross(&v);
    let hn = h.norm();
    if hn <= 0.0 {
        return Err(Error::UnsupportedOrbit(
            "rectilinear orbit (zero angular momentum)".into(),
        ));
    }
    let h_hat = h / hn;
    let a = -body.mu / (2.0 * energy);
    let e_vec = (r * (v.norm_squared() - body.mu / rn) - v * r.dot(&v)) / body.mu;
    let e = e_vec.norm();
    if e >= 1.0 {
        return Err(Error::UnsupportedOrbit(format!(
            "eccentricity {e} is not elliptic"
        )));
    }

    let h_xy = h.x.hypot(h.y);
    let i = h_xy.atan2(h.z);
    let equatorial = h_xy < SINGULAR_TOL * hn;
    let circular = e < SINGULAR_TOL;

    let (raan, node_dir) = if equatorial {
        (0.0, Vector3::x())
    } else {
        let n = Vector3::new(-h.y, h.x, 0.0);
        (n.y.atan2(n.x), n / n.norm())
    };

    let (argp, true_anom) = if circular {
        (0.0, signed_angle(&node_dir, &r, &h_hat))
    } else {
        (
            signed_angle(&node_dir, &e_vec, &h_hat),
            signed_angle(&e_vec, &r, &h_hat),
        )
    };

    Ok(KeplerianElements {
        a,
        e: if circular { 0.0 } else { e },
        i: i.clamp(0.0, PI),
        raan: wrap_two_pi(raan),
        argp: wrap_two_pi(argp),
        true_anom: wrap_two_pi(true_anom),
        epoch: st.epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::kepler::wrap_pi;
    use std::f64::consts::TAU;

    fn epoch0() -> Epoch {
        Epoch::from_mjd2000(6598.9).unwrap()
    }

    #[test]
    fn circular_equatorial_state() {
        let el = KeplerianElements::new(7000.0, 0.0, 0.0, 0.0, 0.0, 0.0, epoch0()).unwrap();
        let st = elements_to_state(&el, &CentralBody::EARTH);
        let vc = (crate::astro::MU_EARTH / 7000.0).sqrt();
        assert!((st.r - Vector3::new(7000.0, 0.0, 0.0)).norm() < 1e-9);
        assert!((st.v - Vector3::new(0.0, vc, 0.0)).norm() < 1e-12);
        assert!((vc - 7.546).abs() < 1e-3);
    }

    #[test]
    fn opposite_anomaly_negates_position() {
        let body = CentralBody::EARTH;
        let a = KeplerianElements::new(7000.0, 0.0, 0.4, 1.0, 0.0, 0.0, epoch0()).unwrap();
        let b = KeplerianElements { true_anom: PI, ..a };
        let (sa, sb) = (elements_to_state(&a, &body), elements_to_state(&b, &body));
        assert!((sa.r + sb.r).norm() < 1e-9);
    }

    #[test]
    fn energy_matches_semi_major_axis() {
        let body = CentralBody::EARTH;
        let el = KeplerianElements::new(9000.0, 0.3, 1.1, 2.0, 3.0, 4.0, epoch0()).unwrap();
        let st = elements_to_state(&el, &body);
        let expected = -body.mu / (2.0 * el.a);
        assert!(((st.specific_energy(&body) - expected) / expected).abs() < 1e-9);
        assert_eq!(st.epoch, el.epoch);
    }

    #[test]
    fn circular_equatorial_conventions() {
        let body = CentralBody::EARTH;
        let vc = (body.mu / 7000.0).sqrt();
        let st = CartesianState::new(
            Vector3::new(0.0, 7000.0, 0.0),
            Vector3::new(-vc, 0.0, 0.0),
            epoch0(),
        );
        let el = state_to_elements(&st, &body).unwrap();
        assert!(el.e < 1e-11);
        assert_eq!(el.raan, 0.0);
        assert_eq!(el.argp, 0.0);
        assert!((el.true_anom - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_hyperbolic() {
        let body = CentralBody::EARTH;
        let st = CartesianState::new(
            Vector3::new(7000.0, 0.0, 0.0),
            Vector3::new(0.0, 12.0, 0.0),
            epoch0(),
        );
        assert!(matches!(
            state_to_elements(&st, &body),
            Err(Error::UnsupportedOrbit(_))
        ));
    }

    #[test]
    fn rejects_invalid_elements() {
        assert!(KeplerianElements::new(-1.0, 0.1, 0.0, 0.0, 0.0, 0.0, epoch0()).is_err());
        assert!(KeplerianElements::new(7000.0, 1.0, 0.0, 0.0, 0.0, 0.0, epoch0()).is_err());
    }

    #[test]
    fn normalizes_angles() {
        let el =
            KeplerianElements::from_degrees(7213.0, 7.7e-5, 13.3, 234.3, 330.8, -15.0, epoch0())
                .unwrap();
        assert!((el.true_anom - 345f64.to_radians()).abs() < 1e-12);
        assert!(el.true_anom < TAU);
    }

    #[test]
    fn table_row_with_large_inclination_round_trips_to_equivalent_set() {
        // i = 324.5° is outside [0, π]; the recovered set is the equivalent
        // i = 35.5° orbit with node and periapsis rotated by 180°.
        let body = CentralBody::EARTH;
        let el =
            KeplerianElements::from_degrees(7208.0, 7.5e-5, 324.5, 177.6, 174.3, 123.0, epoch0())
                .unwrap();
        let st = elements_to_state(&el, &body);
        let back = state_to_elements(&st, &body).unwrap();
        assert!((back.a - 7208.0).abs() / 7208.0 < 1e-9);
        assert!((back.e - 7.5e-5).abs() / 7.5e-5 < 1e-6);
        assert!((back.i - 35.5f64.to_radians()).abs() < 1e-9);
        assert!(wrap_pi(back.raan - 357.6f64.to_radians()).abs() < 1e-9);
        assert!(wrap_pi(back.argp - 354.3f64.to_radians()).abs() < 1e-6);
        assert!(wrap_pi(back.true_anom - 123f64.to_radians()).abs() < 1e-6);
        let again = elements_to_state(&back, &body);
        assert!((again.r - st.r).norm() < 1e-6);
        assert!((again.v - st.v).norm() < 1e-9);
    }
}
