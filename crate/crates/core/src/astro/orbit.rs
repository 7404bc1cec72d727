use std::f64::consts::TAU;

use super::elements::signed_angle;
use super::kepler::{eccentric_to_mean, solve_kepler, true_to_eccentric};
use super::{CartesianState, CentralBody, Epoch, KeplerianElements, Vector3, SINGULAR_TOL};
use crate::{Error, Result};

pub fn orbital_period(a: f64, body: &CentralBody) -> f64 {
    TAU * (a * a * a / body.mu).sqrt()
}

/// Analytic two-body propagation of `el` to epoch `to` (either direction).
pub fn propagate(el: &KeplerianElements, to: Epoch, body: &CentralBody) -> Result<CartesianState> {
    KeplerOrbit::from_elements(el, body)?.state_at(to)
}

/// An elliptic orbit prepared for repeated evaluation.
///
/// The orbit is stored as its perifocal axes and mean anomaly at a reference
/// epoch, so evaluating a state costs one Kepler solve and no angle
/// bookkeeping. Near-circular orbits put periapsis at the reference position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeplerOrbit {
    mu: f64,
    a: f64,
    e: f64,
    mean_motion: f64,
    p_hat: Vector3,
    q_hat: Vector3,
    mean_anom0: f64,
    epoch: Epoch,
}

impl KeplerOrbit {
    pub fn from_elements(el: &KeplerianElements, body: &CentralBody) -> Result<Self> {
        el.validate()?;
        let (p_hat, q_hat) = el.perifocal_axes();
        let ea = true_to_eccentric(el.true_anom, el.e);
        Ok(Self::assemble(
            body.mu,
            el.a,
            el.e,
            p_hat,
            q_hat,
            eccentric_to_mean(ea, el.e),
            el.epoch,
        ))
    }

    pub fn from_state(st: &CartesianState, body: &CentralBody) -> Result<Self> {
        let (r, v) = (st.r, st.v);
        let rn = r.norm();
        let energy = st.specific_energy(body);
        if !(energy < 0.0) {
            return Err(Error::UnsupportedOrbit(format!(
                "cannot propagate non-elliptic state (energy {energy:e})"
            )));
        }
        let h = r.cross(&v);
        let hn = h.norm();
        if !(hn > 0.0) {
            return Err(Error::UnsupportedOrbit(
                "rectilinear orbit (zero angular momentum)".into(),
            ));
        }
        let h_hat = h / hn;
        let a = -body.mu / (2.0 * energy);
        let e_vec = (r * (v.norm_squared() - body.mu / rn) - v * r.dot(&v)) / body.mu;
        let mut e = e_vec.norm();
        if e >= 1.0 {
            return Err(Error::UnsupportedOrbit(format!(
                "eccentricity {e} is not elliptic"
            )));
        }
        let (p_hat, nu0) = if e < SINGULAR_TOL {
            e = 0.0;
            (r / rn, 0.0)
        } else {
            let p_hat = e_vec / e;
            (p_hat, signed_angle(&p_hat, &r, &h_hat))
        };
        let q_hat = h_hat.cross(&p_hat);
        let ea = true_to_eccentric(nu0, e);
        Ok(Self::assemble(
            body.mu,
            a,
            e,
            p_hat,
            q_hat,
            eccentric_to_mean(ea, e),
            st.epoch,
        ))
    }

    fn assemble(
        mu: f64,
        a: f64,
        e: f64,
        p_hat: Vector3,
        q_hat: Vector3,
        mean_anom0: f64,
        epoch: Epoch,
    ) -> Self {
        KeplerOrbit {
            mu,
            a,
            e,
            mean_motion: (mu / (a * a * a)).sqrt(),
            p_hat,
            q_hat,
            mean_anom0,
            epoch,
        }
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.a
    }

    pub fn eccentricity(&self) -> f64 {
        self.e
    }

    pub fn epoch(&self) -> Epoch {
        self.epoch
    }

    pub fn period(&self) -> f64 {
        TAU / self.mean_motion
    }

    pub fn state_at(&self, t: Epoch) -> Result<CartesianState> {
        let mut st = self.state_after(t.seconds_since(self.epoch))?;
        st.epoch = t;
        Ok(st)
    }

    /// State `dt` seconds after the reference epoch.
    pub fn state_after(&self, dt: f64) -> Result<CartesianState> {
        // keep the mean anomaly small before handing it to the solver
        let m = (self.mean_anom0 + self.mean_motion * dt).rem_euclid(TAU);
        let ea = solve_kepler(m, self.e)?;
        let (se, ce) = ea.sin_cos();
        let b = self.a * (1.0 - self.e * self.e).sqrt();
        let radius = self.a * (1.0 - self.e * ce);
        let r = self.p_hat * (self.a * (ce - self.e)) + self.q_hat * (b * se);
        let k = (self.mu * self.a).sqrt() / radius;
        let v = self.p_hat * (-k * se) + self.q_hat * (k * (1.0 - self.e * self.e).sqrt() * ce);
        Ok(CartesianState::new(r, v, self.epoch.add_seconds(dt)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::{elements_to_state, MU_EARTH};

    fn pr_row() -> KeplerianElements {
        let t0 = Epoch::from_mjd2000(6598.9).unwrap();
        KeplerianElements::from_degrees(7208.0, 7.5e-5, 324.5, 177.6, 174.3, 123.0, t0).unwrap()
    }

    #[test]
    fn period_values() {
        let body = CentralBody::EARTH;
        let t = orbital_period(7208.0, &body);
        let direct = 2.0 * std::f64::consts::PI * (7208f64.powi(3) / MU_EARTH).sqrt();
        assert!((t - direct).abs() < 1e-9);
        assert!((t - 6090.22).abs() < 0.01);
        assert!((orbital_period(4.0 * 7208.0, &body) / t - 8.0).abs() < 1e-12);
        assert!((orbital_period(42_164.0, &body) - 86_164.0).abs() < 5.0);
    }

    #[test]
    fn zero_step_is_identity() {
        let body = CentralBody::EARTH;
        let el = pr_row();
        let st = propagate(&el, el.epoch, &body).unwrap();
        let direct = elements_to_state(&el, &body);
        assert!((st.r - direct.r).norm() < 1e-9);
        assert!((st.v - direct.v).norm() < 1e-12);
    }

    #[test]
    fn one_period_returns_to_start() {
        let body = CentralBody::EARTH;
        let el = pr_row();
        let t = orbital_period(el.a, &body);
        let st0 = propagate(&el, el.epoch, &body).unwrap();
        let st1 = propagate(&el, el.epoch.add_seconds(t), &body).unwrap();
        assert!((st1.r - st0.r).norm() < 1e-3);
        assert!((st1.v - st0.v).norm() < 1e-6);
    }

    #[test]
    fn half_period_negates_circular_position() {
        let body = CentralBody::EARTH;
        let el =
            KeplerianElements::new(7000.0, 0.0, 0.9, 0.3, 0.0, 1.0, Epoch::J2000_ORIGIN).unwrap();
        let orbit = KeplerOrbit::from_elements(&el, &body).unwrap();
        let st0 = orbit.state_after(0.0).unwrap();
        let st1 = orbit.state_after(orbit.period() / 2.0).unwrap();
        assert!((st0.r + st1.r).norm() < 1e-8);
    }

    #[test]
    fn from_state_matches_from_elements() {
        let body = CentralBody::EARTH;
        for el in [
            pr_row(),
            KeplerianElements::new(9000.0, 0.4, 0.0, 0.0, 1.0, 2.0, Epoch::J2000_ORIGIN).unwrap(),
            KeplerianElements::new(7000.0, 0.0, 1.0, 2.0, 0.0, 3.0, Epoch::J2000_ORIGIN).unwrap(),
        ] {
            let a = KeplerOrbit::from_elements(&el, &body).unwrap();
            let b = KeplerOrbit::from_state(&elements_to_state(&el, &body), &body).unwrap();
            for dt in [-5000.0, 0.0, 1234.5, 86_400.0] {
                let (sa, sb) = (a.state_after(dt).unwrap(), b.state_after(dt).unwrap());
                assert!((sa.r - sb.r).norm() < 1e-6, "dt={dt}");
                assert!((sa.v - sb.v).norm() < 1e-9, "dt={dt}");
            }
        }
    }

    #[test]
    fn backward_then_forward() {
        let body = CentralBody::EARTH;
        let el = pr_row();
        let back = propagate(&el, el.epoch.add_seconds(-20_000.0), &body).unwrap();
        let orbit = KeplerOrbit::from_state(&back, &body).unwrap();
        let fwd = orbit.state_at(el.epoch).unwrap();
        let direct = elements_to_state(&el, &body);
        assert!((fwd.r - direct.r).norm() < 1e-6);
    }
}
