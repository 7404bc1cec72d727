use std::path::Path;

use ooscam::astro::{propagate, CentralBody, Epoch};
use ooscam::conjunction::find_tca;
use ooscam::scenario::{
    case_study_scenario, make_collision_scenario, random_conjunction_spec, random_scenario,
    read_scenario, scenario_from_json, scenario_to_json, write_scenario, ConjunctionSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn case_study_rows() {
    let s = case_study_scenario();
    assert!((s.start.mjd2000() - 6598.9).abs() < 1e-3);
    assert_eq!(s.target.a, 7208.0);
    assert!((s.target.i.to_degrees() - 324.5).abs() < 1e-9);
    assert!((s.debris.true_anom.to_degrees() - 345.0).abs() < 1e-9);
    assert!(((s.servicer.true_anom - s.target.true_anom).to_degrees() - 12.0).abs() < 1e-9);
}

#[test]
fn generated_geometry_matches_spec() {
    let body = CentralBody::EARTH;
    let start = Epoch::from_mjd2000(6598.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 100 {
        let (target, spec) = random_conjunction_spec(&mut rng, start).unwrap();
        let Ok(s) = make_collision_scenario(&target, &spec, start, &body) else {
            continue;
        };
        checked += 1;
        let hit = start.add_seconds(spec.dt_tca);
        let t = propagate(&s.target, hit, &body).unwrap();
        let d = propagate(&s.debris, hit, &body).unwrap();
        assert!((t.r - d.r).norm() < 1.0);
        assert!((t.v.angle(&d.v) - spec.approach_angle).abs() < 0.5f64.to_radians());
        assert!((d.v.norm() / t.v.norm() / spec.vel_ratio - 1.0).abs() < 0.01);
        let ca = find_tca(&s.target, &s.debris, (s.start, s.end), &body)
            .unwrap()
            .unwrap();
        assert!(
            ca.tca.seconds_since(hit).abs() < 1.0,
            "#{checked} off {} s, miss {} km, spec {spec:?}, window {}",
            ca.tca.seconds_since(hit),
            ca.miss_distance,
            s.end.seconds_since(s.start)
        );
    }
}

#[test]
fn head_on_doubles_relative_speed() {
    let body = CentralBody::EARTH;
    let s0 = case_study_scenario();
    let spec = ConjunctionSpec {
        dt_tca: 3600.0,
        approach_angle: std::f64::consts::PI,
        vel_ratio: 1.0,
        phase_offset: 0.2,
    };
    let s = make_collision_scenario(&s0.target, &spec, s0.start, &body).unwrap();
    let hit = s.start.add_seconds(3600.0);
    let t = propagate(&s.target, hit, &body).unwrap();
    let d = propagate(&s.debris, hit, &body).unwrap();
    assert!(((t.v - d.v).norm() / t.v.norm() - 2.0).abs() < 1e-6);
}

#[test]
fn impossible_speed_is_rejected() {
    let s0 = case_study_scenario();
    let spec = ConjunctionSpec {
        dt_tca: 3600.0,
        approach_angle: 1.0,
        vel_ratio: 2.0,
        phase_offset: 0.2,
    };
    let err =
        make_collision_scenario(&s0.target, &spec, s0.start, &CentralBody::EARTH).unwrap_err();
    assert!(err.to_string().contains("vel_ratio"), "{err}");
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let s = random_scenario(
        17,
        Epoch::from_mjd2000(6598.9).unwrap(),
        &CentralBody::EARTH,
    )
    .unwrap();
    write_scenario(&path, &s, None).unwrap();
    assert_eq!(read_scenario(&path).unwrap(), s);
}

#[test]
fn schema_errors_name_the_field() {
    let text = scenario_to_json(&case_study_scenario(), None);
    let broken = text.replacen("\"fuel_capacity", "\"fuel_capacityX", 1);
    let err = scenario_from_json(&broken, Path::new("x.json")).unwrap_err();
    assert!(err.to_string().contains("fuel_capacity"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let s = random_scenario(seed, Epoch::from_mjd2000(6598.9).unwrap(), &CentralBody::EARTH).unwrap();
        let back = scenario_from_json(&scenario_to_json(&s, None), Path::new("<mem>")).unwrap();
        prop_assert_eq!(back, s);
    }
}
