use ooscam::environment::{
    evaluate, reward_total, run_episode, ActionTable, Deviation, EpisodeConfig, EpisodeMetrics,
    RewardThresholds, RewardWeights,
};
use ooscam::scenario::{case_study_conjunction_scenario, case_study_scenario, Scenario};
use ooscam::training::{init_lambert, InitBounds};
use proptest::prelude::*;

fn lambert_table(s: &Scenario, seed: u64) -> ActionTable {
    init_lambert(
        s,
        s.start,
        s.start.add_days(0.0704),
        &InitBounds::default(),
        seed,
    )
    .unwrap()
}

#[test]
fn trace_invariants() {
    let s = case_study_conjunction_scenario().unwrap();
    let table = lambert_table(&s, 4);
    let out = run_episode(&s, &table, &EpisodeConfig::default()).unwrap();
    let rows = &out.trace.rows;
    assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
    assert!(rows
        .windows(2)
        .all(|w| w[1].fuel_remaining <= w[0].fuel_remaining));
    assert!(rows.windows(2).all(|w| w[0].docked <= w[1].docked));
    assert!(out.summary.docked);
    let t_dock = out.trace.t_dock.unwrap();
    for r in rows.iter().filter(|r| r.t >= t_dock) {
        // the docked stack flies as one body
        assert!(r.rel_distance < 1e-3, "{} m apart", r.rel_distance);
        assert!(r.rel_speed < 1e-6);
    }
    let last = rows.last().unwrap();
    assert!(
        (last.reward_to_date - out.summary.breakdown.total).abs()
            <= 1e-9 * out.summary.breakdown.total.abs()
    );
}

#[test]
fn fuel_accounting() {
    let s = case_study_scenario();
    for table in [
        ActionTable::published_random_init(),
        ActionTable::published_lambert_init(),
        lambert_table(&s, 1),
    ] {
        let out = run_episode(&s, &table, &EpisodeConfig::default()).unwrap();
        let used = out.summary.metrics.fuel_used;
        assert!((used - table.total_dv()).abs() < 1e-9);
        let end = out.trace.rows.last().unwrap().fuel_remaining;
        assert!((s.fuel_capacity - used - end).abs() < 1e-9);
    }
}

#[test]
fn episodes_are_deterministic() {
    let s = case_study_conjunction_scenario().unwrap();
    let table = lambert_table(&s, 2);
    let cfg = EpisodeConfig::default();
    let a = run_episode(&s, &table, &cfg).unwrap();
    let b = run_episode(&s, &table, &cfg).unwrap();
    assert_eq!(a, b);
    let mut buf_a = Vec::new();
    let mut buf_b = Vec::new();
    a.trace.write_csv(&mut buf_a, &[], 6090.0).unwrap();
    b.trace.write_csv(&mut buf_b, &[], 6090.0).unwrap();
    assert_eq!(buf_a, buf_b);
    assert_eq!(evaluate(&s, &table, &cfg).unwrap(), a.summary);
}

#[test]
fn grid_refinement_is_stable() {
    let s = case_study_conjunction_scenario().unwrap();
    let base = EpisodeConfig::default();
    let mut finer = base;
    finer.grid.coarse_step /= 2.0;
    for table in [
        ActionTable::published_random_init(),
        ActionTable::published_lambert_init(),
        lambert_table(&s, 3),
    ] {
        let a = evaluate(&s, &table, &base).unwrap().breakdown.total;
        let b = evaluate(&s, &table, &finer).unwrap().breakdown.total;
        assert!((a - b).abs() <= 0.01 * a.abs(), "{a} vs {b}");
    }
}

fn deviation() -> impl Strategy<Value = Deviation> {
    (
        0.0..1e4f64,
        0.0..0.1f64,
        0.0..1.0f64,
        0.0..1.0f64,
        0.0..3.0f64,
    )
        .prop_map(|(a, e, i, raan, argp)| Deviation {
            a,
            e,
            i,
            raan,
            argp,
        })
}

proptest! {
    #[test]
    fn reward_monotone_in_deviation(d in deviation(), which in 0usize..5, bump in 0.0..10.0f64) {
        let (thr, w) = (RewardThresholds::default(), RewardWeights::default());
        let m = EpisodeMetrics { pc: 1e-6, fuel_used: 10.0, deviation: d, dock_distance: 0.0, dock_speed: 0.0 };
        let mut worse = m;
        let field = match which {
            0 => &mut worse.deviation.a,
            1 => &mut worse.deviation.e,
            2 => &mut worse.deviation.i,
            3 => &mut worse.deviation.raan,
            _ => &mut worse.deviation.argp,
        };
        *field += bump * field.max(1e-3);
        prop_assert!(reward_total(&worse, &thr, &w).total <= reward_total(&m, &thr, &w).total);
    }

    #[test]
    fn reward_monotone_in_pc_and_fuel(pc in 0.0..1.0f64, fuel in 0.0..1e3f64, k in 1.0..10.0f64) {
        let (thr, w) = (RewardThresholds::default(), RewardWeights::default());
        let m = EpisodeMetrics { pc, fuel_used: fuel, deviation: Deviation::default(), dock_distance: 10.0, dock_speed: 0.1 };
        let base = reward_total(&m, &thr, &w).total;
        let more_pc = EpisodeMetrics { pc: (pc * k).min(1.0), ..m };
        let more_fuel = EpisodeMetrics { fuel_used: fuel * k, ..m };
        prop_assert!(reward_total(&more_pc, &thr, &w).total <= base);
        prop_assert!(reward_total(&more_fuel, &thr, &w).total <= base);
    }
}
