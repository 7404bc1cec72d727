use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConjunctionSpec, Provenance, Scenario};
use crate::astro::{
    elements_to_state, orbital_period, propagate, state_to_elements, CartesianState, CentralBody,
    Epoch, KeplerianElements, Vector3,
};
use crate::conjunction::{find_tca, CovarianceSpec};
use crate::{Error, Result};

pub const CASE_STUDY_START_UTC: &str = "2018-01-24T21:35:59";
pub const CASE_STUDY_END_UTC: &str = "2018-01-27T02:24:00";
const DEFAULT_FUEL: f64 = 500.0;
/// Collision epoch used by the conjunction variant of the case study,
/// between the two published collision-avoidance burns.
const CASE_STUDY_TCA_MJD2000: f64 = 6600.64;

/// Rotates `v` by `angle` about the unit axis `k` (Rodrigues).
fn rotate(v: &Vector3, k: &Vector3, angle: f64) -> Vector3 {
    let (s, c) = angle.sin_cos();
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

fn table_row(
    a: f64,
    e: f64,
    i: f64,
    raan: f64,
    argp: f64,
    nu: f64,
    epoch: Epoch,
) -> KeplerianElements {
    KeplerianElements::from_degrees(a, e, i, raan, argp, nu, epoch)
        .expect("case-study rows are valid")
}

fn case_study_window() -> (Epoch, Epoch) {
    (
        Epoch::parse_utc(CASE_STUDY_START_UTC).expect("valid"),
        Epoch::parse_utc(CASE_STUDY_END_UTC).expect("valid"),
    )
}

/// The published case study: target, servicer and debris elements at the
/// start of the two-day window, taken verbatim.
///
/// Note that the published debris orbit never comes within ~4 km of the
/// target (its semi-major axis is 5 km larger and both orbits are nearly
/// circular), so this scenario carries no collision risk;
/// [`case_study_conjunction_scenario`] provides one that does.
pub fn case_study_scenario() -> Scenario {
    let (start, end) = case_study_window();
    let body = CentralBody::EARTH;
    let target = table_row(7208.0, 7.5e-5, 324.5, 177.6, 174.3, 123.0, start);
    let servicer = table_row(7208.0, 7.5e-5, 324.5, 177.6, 174.3, 135.0, start);
    let debris = table_row(7213.0, 7.7e-5, 13.3, 234.3, 330.8, -15.0, start);
    let tca_hint = find_tca(&target, &debris, (start, end), &body)
        .ok()
        .flatten()
        .map(|ca| ca.tca)
        .unwrap_or(end);
    Scenario {
        target,
        servicer,
        debris,
        start,
        end,
        fuel_capacity: DEFAULT_FUEL,
        cov: CovarianceSpec::default(),
        tca_hint,
        body,
        provenance: Provenance {
            kind: "case-study".into(),
            seed: None,
            conjunction: None,
        },
    }
}

/// The case study with its debris replaced by a synthetic object that
/// collides with the target at mjd2000 6600.64. The crossing angle equals
/// the angle between the published target and debris orbital planes and the
/// speed ratio matches their circular speeds.
pub fn case_study_conjunction_scenario() -> Result<Scenario> {
    let verbatim = case_study_scenario();
    let body = verbatim.body;
    let t = &verbatim.target;
    let d = &verbatim.debris;
    let normal = |el: &KeplerianElements| {
        let st = elements_to_state(el, &body);
        st.r.cross(&st.v).normalize()
    };
    let crossing = normal(t).dot(&normal(d)).clamp(-1.0, 1.0).acos();
    let tca = Epoch::from_mjd2000(CASE_STUDY_TCA_MJD2000)?;
    let spec = ConjunctionSpec {
        dt_tca: tca.seconds_since(verbatim.start),
        approach_angle: crossing,
        vel_ratio: (t.a / d.a).sqrt(),
        phase_offset: (135.0f64 - 123.0).to_radians(),
    };
    let mut s = make_collision_scenario(t, &spec, verbatim.start, &body)?;
    s.end = verbatim.end;
    s.provenance.kind = "case-study-conjunction".into();
    Ok(s)
}

/// Builds a scenario whose debris, left alone, hits the target exactly
/// `spec.dt_tca` seconds after `start`.
///
/// The debris velocity at the collision point is the target velocity turned
/// by the approach angle (about the radial direction, made orthogonal to the
/// velocity) and scaled by the speed ratio; that state is propagated back to
/// `start`. The servicer shares the target orbit, leading it by the phase
/// offset. The window closes two target periods after the collision.
pub fn make_collision_scenario(
    target: &KeplerianElements,
    spec: &ConjunctionSpec,
    start: Epoch,
    body: &CentralBody,
) -> Result<Scenario> {
    spec.validate()?;
    target.validate()?;
    let t_hit = start.add_seconds(spec.dt_tca);
    let at_hit = propagate(target, t_hit, body)?;
    let (r, v) = (at_hit.r, at_hit.v);
    let v_hat = v.normalize();
    let radial = r.normalize();
    let axis = radial - v_hat * radial.dot(&v_hat);
    if axis.norm() < 1e-12 {
        return Err(Error::InfeasibleGeometry(
            "target velocity is purely radial at the collision point".into(),
        ));
    }
    let axis = axis.normalize();
    let v_debris = rotate(&v, &axis, spec.approach_angle) * spec.vel_ratio;
    if (v_debris - v).norm() < 1e-6 {
        return Err(Error::InfeasibleGeometry(
            "approach angle and velocity ratio reproduce the target orbit (no relative motion)"
                .into(),
        ));
    }

    let debris_hit = CartesianState::new(r, v_debris, t_hit);
    let energy = debris_hit.specific_energy(body);
    if energy >= 0.0 {
        return Err(Error::InfeasibleGeometry(format!(
            "vel_ratio {} gives an unbound debris orbit through the collision point",
            spec.vel_ratio
        )));
    }
    let el_hit = state_to_elements(&debris_hit, body)?;
    let perigee = el_hit.a * (1.0 - el_hit.e);
    if perigee <= body.radius {
        return Err(Error::InfeasibleGeometry(format!(
            "vel_ratio {} puts the debris perigee at {perigee:.1} km, inside the central body",
            spec.vel_ratio
        )));
    }
    let debris = state_to_elements(&propagate(&el_hit, start, body)?, body)?;
    let target_start = propagate(target, start, body)?;
    let target = state_to_elements(&target_start, body)?;
    let servicer = KeplerianElements::new(
        target.a,
        target.e,
        target.i,
        target.raan,
        target.argp,
        target.true_anom + spec.phase_offset,
        start,
    )?;

    let check = propagate(&debris, t_hit, body)?;
    let miss = (check.r - at_hit.r).norm();
    if miss > 1e-3 {
        return Err(Error::SolverFailure(format!(
            "debris construction misses by {miss} km"
        )));
    }

    Ok(Scenario {
        target,
        servicer,
        debris,
        start,
        end: t_hit.add_seconds(2.0 * orbital_period(target.a, body)),
        fuel_capacity: DEFAULT_FUEL,
        cov: CovarianceSpec::default(),
        tca_hint: t_hit,
        body: *body,
        provenance: Provenance {
            kind: "generated".into(),
            seed: None,
            conjunction: Some(*spec),
        },
    })
}

/// Draws a low-Earth target and a collision geometry that is always
/// constructible: near-circular orbits, speed ratio within a few percent.
pub fn random_conjunction_spec(
    rng: &mut impl Rng,
    start: Epoch,
) -> Result<(KeplerianElements, ConjunctionSpec)> {
    let target = KeplerianElements::new(
        rng.random_range(6900.0..7800.0),
        rng.random_range(0.0..0.01),
        rng.random_range(0.05..PI - 0.05),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
        start,
    )?;
    let spec = ConjunctionSpec {
        dt_tca: rng.random_range(0.2..2.0) * 86_400.0,
        approach_angle: rng.random_range(10f64.to_radians()..PI),
        vel_ratio: rng.random_range(0.99..1.05),
        phase_offset: rng.random_range(5f64.to_radians()..30f64.to_radians()),
    };
    Ok((target, spec))
}

/// Seeded synthetic scenario; infeasible draws are redrawn.
pub fn random_scenario(seed: u64, start: Epoch, body: &CentralBody) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..100 {
        let (target, spec) = random_conjunction_spec(&mut rng, start)?;
        match make_collision_scenario(&target, &spec, start, body) {
            Ok(mut s) => {
                s.provenance.seed = Some(seed);
                return Ok(s);
            }
            Err(e @ Error::InfeasibleGeometry(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::InfeasibleGeometry("no feasible draw".into())))
}
