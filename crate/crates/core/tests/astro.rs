use std::f64::consts::{PI, TAU};

use ooscam::astro::kepler::wrap_two_pi;
use ooscam::astro::{
    elements_to_state, lambert, orbital_period, propagate, solve_kepler, state_to_elements,
    CentralBody, Epoch, KeplerOrbit, KeplerianElements,
};
use proptest::prelude::*;

const EARTH: CentralBody = CentralBody::EARTH;

fn elements() -> impl Strategy<Value = KeplerianElements> {
    (
        6700.0..45_000.0f64,
        1e-6..0.9f64,
        1e-3..(PI - 1e-3),
        0.0..TAU,
        0.0..TAU,
        0.0..TAU,
        -5000.0..5000.0f64,
    )
        .prop_map(|(a, e, i, raan, argp, nu, t)| {
            KeplerianElements::new(a, e, i, raan, argp, nu, Epoch::from_mjd2000(t).unwrap())
                .unwrap()
        })
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = wrap_two_pi(a - b);
    d.min(TAU - d)
}

#[test]
fn kepler_residual_over_grid() {
    for mi in 0..=63 {
        let m = (0.1 * mi as f64).min(TAU);
        for ei in 0..=10 {
            let e = (0.1 * ei as f64).min(0.99);
            let ea = solve_kepler(m, e).unwrap();
            assert!(
                (ea - e * ea.sin() - wrap_two_pi(m)).abs() < 1e-12,
                "M={m} e={e}"
            );
        }
    }
}

#[test]
fn kepler_bisection_oracle() {
    let (mut lo, mut hi) = (0.0f64, TAU);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - 0.5 * mid.sin() - 1.0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((solve_kepler(1.0, 0.5).unwrap() - lo).abs() < 1e-12);
    assert!((lo - 1.4987).abs() < 1e-4);
}

#[test]
fn period_examples() {
    assert!((orbital_period(7208.0, &EARTH) - 6090.3).abs() < 0.1);
    assert!((orbital_period(42_164.0, &EARTH) - 86_164.0).abs() < 1.0);
    let ratio = orbital_period(28_000.0, &EARTH) / orbital_period(7000.0, &EARTH);
    assert!((ratio - 8.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn element_round_trip(el in elements()) {
        let back = state_to_elements(&elements_to_state(&el, &EARTH), &EARTH).unwrap();
        prop_assert!((back.a - el.a).abs() <= 1e-9 * el.a);
        prop_assert!((back.e - el.e).abs() <= 1e-9);
        prop_assert!((back.i - el.i).abs() <= 1e-9);
        prop_assert!(angle_gap(back.raan, el.raan) <= 1e-9);
        // ω and ν trade off as e → 0; their sum is what the state fixes
        prop_assert!(angle_gap(back.argp + back.true_anom, el.argp + el.true_anom) <= 1e-9);
        if el.e > 1e-4 {
            prop_assert!(angle_gap(back.true_anom, el.true_anom) <= 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn state_round_trip(el in elements()) {
        let st = elements_to_state(&el, &EARTH);
        let back = elements_to_state(&state_to_elements(&st, &EARTH).unwrap(), &EARTH);
        prop_assert!((back.r - st.r).norm() <= 1e-9 * st.r.norm());
        prop_assert!((back.v - st.v).norm() <= 1e-9 * st.v.norm());
        let energy = st.specific_energy(&EARTH);
        prop_assert!((energy + EARTH.mu / (2.0 * el.a)).abs() <= 1e-9 * energy.abs());
    }

    #[test]
    fn propagation_conserves(el in elements(), dt in -2e5..2e5f64) {
        let s0 = elements_to_state(&el, &EARTH);
        let s1 = propagate(&el, el.epoch.add_seconds(dt), &EARTH).unwrap();
        let (e0, e1) = (s0.specific_energy(&EARTH), s1.specific_energy(&EARTH));
        prop_assert!((e1 - e0).abs() <= 1e-9 * e0.abs());
        let (h0, h1) = (s0.angular_momentum().norm(), s1.angular_momentum().norm());
        prop_assert!((h1 - h0).abs() <= 1e-9 * h0);
    }

    #[test]
    fn one_period_returns(el in elements()) {
        let st = propagate(&el, el.epoch.add_seconds(orbital_period(el.a, &EARTH)), &EARTH).unwrap();
        let s0 = elements_to_state(&el, &EARTH);
        prop_assert!((st.r - s0.r).norm() < 1e-3);
        prop_assert!((st.v - s0.v).norm() < 1e-6);
    }

    #[test]
    fn lambert_consistency(el in elements(), frac in 0.02..0.9f64) {
        let orbit = KeplerOrbit::from_elements(&el, &EARTH).unwrap();
        let dt = frac * orbit.period();
        let s0 = orbit.state_after(0.0).unwrap();
        let s1 = orbit.state_after(dt).unwrap();
        let prograde = s0.angular_momentum().z >= 0.0;
        let angle = s0.r.angle(&s1.r);
        // the transfer plane is undefined next to 0 and π
        prop_assume!(angle > 1e-3 && (PI - angle) > 1e-3);
        let sol = lambert(&s0.r, &s1.r, dt, &EARTH, prograde).unwrap();
        prop_assert!((sol.v0 - s0.v).norm() < 1e-6, "v0 off by {}", (sol.v0 - s0.v).norm());
        prop_assert!((sol.v1 - s1.v).norm() < 1e-6);
    }
}

#[test]
fn lambert_quarter_circle() {
    let r = 7000.0;
    let el = KeplerianElements::new(r, 0.0, 0.0, 0.0, 0.0, 0.0, Epoch::J2000_ORIGIN).unwrap();
    let s0 = elements_to_state(&el, &EARTH);
    let t = orbital_period(r, &EARTH) / 4.0;
    let s1 = propagate(&el, Epoch::J2000_ORIGIN.add_seconds(t), &EARTH).unwrap();
    let sol = lambert(&s0.r, &s1.r, t, &EARTH, true).unwrap();
    assert!((sol.v0.norm() - (EARTH.mu / r).sqrt()).abs() < 1e-6);
}
