//! One deterministic pass of an action table through a scenario.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::grid::{build_time_grid, GridConfig};
use super::reward::{
    docking_check, reward_total, Deviation, EpisodeMetrics, RewardBreakdown, RewardThresholds,
    RewardWeights,
};
use super::{apply_maneuver, ActionTable};
use crate::astro::kepler::wrap_pi;
use crate::astro::{
    elements_to_state, state_to_elements, CartesianState, Epoch, KeplerOrbit, KeplerianElements,
};
use crate::conjunction::{
    assess, closest_approaches, ClosestApproach, ConjunctionEvent, TcaSearch,
};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Burns closer than this to a grid point (s) fire at that point.
const BURN_TOL: f64 = 1e-6;
/// Conjunction searches look this far (s) past each trajectory segment so
/// that minima near a burn are still bracketed.
const SEGMENT_MARGIN: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub grid: GridConfig,
    pub thresholds: RewardThresholds,
    pub weights: RewardWeights,
    /// Scanned separations above this (km) are not refined into conjunctions.
    #[serde(rename = "screen_km")]
    pub screen: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            grid: GridConfig::default(),
            thresholds: RewardThresholds::default(),
            weights: RewardWeights::default(),
            screen: 200.0,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.thresholds.validate()?;
        self.weights.validate()?;
        if !(self.screen > 0.0) {
            return Err(Error::InvalidInput(format!(
                "screen distance must be positive, got {}",
                self.screen
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: Epoch,
    pub fine: bool,
    pub servicer: CartesianState,
    pub target: CartesianState,
    pub debris: CartesianState,
    /// m
    pub rel_distance: f64,
    /// m/s
    pub rel_speed: f64,
    /// Combined Pc of conjunctions already flown through.
    pub pc_to_date: f64,
    /// Combined Pc of conjunctions still ahead if the target coasts from here.
    pub pc_predicted: f64,
    pub fuel_remaining: f64,
    pub docked: bool,
    pub deviation: Deviation,
    pub reward_to_date: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
    pub t_dock: Option<Epoch>,
    /// Epoch of the first burn, the origin of T_dock.
    pub first_burn: Epoch,
    /// Reference TCA of the unmaneuvered target.
    pub tca: Epoch,
    /// Conjunctions flown by the (possibly maneuvered) target.
    pub events: Vec<ConjunctionEvent>,
    /// Set when a numerical failure cut the episode short.
    pub failure: Option<String>,
}

pub const TRACE_COLUMNS: [&str; 35] = [
    "epoch_mjd2000",
    "t_days",
    "fine",
    "servicer_x_km",
    "servicer_y_km",
    "servicer_z_km",
    "servicer_vx_kmps",
    "servicer_vy_kmps",
    "servicer_vz_kmps",
    "target_x_km",
    "target_y_km",
    "target_z_km",
    "target_vx_kmps",
    "target_vy_kmps",
    "target_vz_kmps",
    "debris_x_km",
    "debris_y_km",
    "debris_z_km",
    "debris_vx_kmps",
    "debris_vy_kmps",
    "debris_vz_kmps",
    "rel_distance_m",
    "rel_speed_mps",
    "pc_to_date",
    "pc_predicted",
    "fuel_remaining_units",
    "docked",
    "dev_a_m",
    "dev_e",
    "dev_i_rad",
    "dev_raan_rad",
    "dev_argp_rad",
    "reward_to_date",
    "dt_tca_days",
    "t_dock_periods",
];

impl SimTrace {
    /// Writes one CSV row per grid point. `comments` become leading `# ` lines.
    /// `t_dock_periods` is T_dock in target periods, filled from the
    /// docking row onwards.
    pub fn write_csv<W: Write>(
        &self,
        mut w: W,
        comments: &[String],
        target_period: f64,
    ) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", TRACE_COLUMNS.join(","))?;
        let Some(first) = self.rows.first() else {
            return Ok(());
        };
        let start = first.t;
        let t_dock = self
            .t_dock
            .map(|td| td.seconds_since(self.first_burn) / target_period);
        for r in &self.rows {
            let mut f: Vec<String> = Vec::with_capacity(TRACE_COLUMNS.len());
            f.push(r.t.mjd2000().to_string());
            f.push((r.t.seconds_since(start) / 86_400.0).to_string());
            f.push(u8::from(r.fine).to_string());
            for st in [&r.servicer, &r.target, &r.debris] {
                f.extend(st.r.iter().chain(st.v.iter()).map(f64::to_string));
            }
            f.push(r.rel_distance.to_string());
            f.push(r.rel_speed.to_string());
            f.push(r.pc_to_date.to_string());
            f.push(r.pc_predicted.to_string());
            f.push(r.fuel_remaining.to_string());
            f.push(u8::from(r.docked).to_string());
            let d = &r.deviation;
            f.extend([d.a, d.e, d.i, d.raan, d.argp].iter().map(f64::to_string));
            f.push(r.reward_to_date.to_string());
            f.push((r.t.seconds_since(self.tca) / 86_400.0).to_string());
            f.push(match (r.docked, t_dock) {
                (true, Some(p)) => p.to_string(),
                _ => String::new(),
            });
            writeln!(w, "{}", f.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeSummary {
    pub breakdown: RewardBreakdown,
    pub metrics: EpisodeMetrics,
    pub docked: bool,
    pub t_dock: Option<Epoch>,
    pub failed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub trace: SimTrace,
    pub summary: EpisodeSummary,
}

/// Simulates the table and returns the full trace with the reward.
/// Invalid inputs are errors; numerical failures mid-episode yield the
/// configured worst-case reward instead.
pub fn run_episode(
    scenario: &Scenario,
    table: &ActionTable,
    cfg: &EpisodeConfig,
) -> Result<EpisodeOutcome> {
    check_inputs(scenario, table, cfg)?;
    let mut trace = SimTrace {
        rows: Vec::new(),
        t_dock: None,
        first_burn: table.rows[0].t,
        tca: scenario.tca_hint,
        events: Vec::new(),
        failure: None,
    };
    let summary = match simulate(scenario, table, cfg, Some(&mut trace)) {
        Ok(s) => s,
        Err(e) if e.is_numerical() => {
            trace.failure = Some(e.to_string());
            failed_summary(cfg)
        }
        Err(e) => return Err(e),
    };
    Ok(EpisodeOutcome { trace, summary })
}

/// Same episode as [`run_episode`] without recording a trace.
pub fn evaluate(
    scenario: &Scenario,
    table: &ActionTable,
    cfg: &EpisodeConfig,
) -> Result<EpisodeSummary> {
    check_inputs(scenario, table, cfg)?;
    match simulate(scenario, table, cfg, None) {
        Err(e) if e.is_numerical() => Ok(failed_summary(cfg)),
        other => other,
    }
}

fn check_inputs(scenario: &Scenario, table: &ActionTable, cfg: &EpisodeConfig) -> Result<()> {
    scenario.validate()?;
    table.validate(Some(scenario))?;
    cfg.validate()
}

fn failed_summary(cfg: &EpisodeConfig) -> EpisodeSummary {
    EpisodeSummary {
        breakdown: RewardBreakdown::failure(&cfg.weights),
        metrics: EpisodeMetrics {
            pc: 1.0,
            fuel_used: f64::NAN,
            deviation: Deviation {
                a: f64::NAN,
                e: f64::NAN,
                i: f64::NAN,
                raan: f64::NAN,
                argp: f64::NAN,
            },
            dock_distance: f64::NAN,
            dock_speed: f64::NAN,
        },
        docked: false,
        t_dock: None,
        failed: true,
    }
}

/// `1 − Π(1 − pᵢ)`
pub fn combine_pc<I: IntoIterator<Item = f64>>(pcs: I) -> f64 {
    1.0 - pcs.into_iter().fold(1.0, |q, p| q * (1.0 - p))
}

/// Osculating-element deviation of `state` from `reference`.
pub fn element_deviation(
    reference: &KeplerianElements,
    state: &CartesianState,
    scenario: &Scenario,
) -> Result<Deviation> {
    let el = state_to_elements(state, &scenario.body)?;
    Ok(Deviation {
        a: (el.a - reference.a).abs() * 1000.0,
        e: (el.e - reference.e).abs(),
        i: wrap_pi(el.i - reference.i).abs(),
        raan: wrap_pi(el.raan - reference.raan).abs(),
        argp: wrap_pi(el.argp - reference.argp).abs(),
    })
}

struct Segment {
    start: Epoch,
    orbit: KeplerOrbit,
}

fn simulate(
    scenario: &Scenario,
    table: &ActionTable,
    cfg: &EpisodeConfig,
    trace: Option<&mut SimTrace>,
) -> Result<EpisodeSummary> {
    let body = scenario.body;
    let thr = &cfg.thresholds;
    let grid = build_time_grid(scenario, table, &cfg.grid)?;
    // compare in the solver's own element convention
    let reference = state_to_elements(&elements_to_state(&scenario.target, &body), &body)?;
    let debris = KeplerOrbit::from_elements(&scenario.debris, &body)?;
    let mut target = KeplerOrbit::from_elements(&scenario.target, &body)?;
    let mut servicer = KeplerOrbit::from_elements(&scenario.servicer, &body)?;
    let mut segments = vec![Segment {
        start: scenario.start,
        orbit: target,
    }];
    let recording = trace.is_some();

    let mut fuel = scenario.fuel_capacity;
    let mut fuel_used = 0.0;
    let mut next_burn = 0;
    let mut docked = false;
    let mut t_dock = None;
    // separation at the docking instant, or the latest one while undocked
    let mut dock = (f64::INFINITY, f64::INFINITY);
    let mut rows: Vec<TraceRow> = Vec::new();
    let mut dock_so_far: Vec<(f64, f64)> = Vec::new();

    for (k, &t) in grid.epochs.iter().enumerate() {
        let mut st_t = target.state_at(t)?;
        let mut st_s = if docked { st_t } else { servicer.state_at(t)? };
        while next_burn < table.rows.len() && table.rows[next_burn].t.seconds_since(t) < BURN_TOL {
            let m = &table.rows[next_burn];
            fuel_used += m.magnitude();
            if docked {
                (st_t, fuel) = apply_maneuver(&st_t, m, fuel);
                target = KeplerOrbit::from_state(&st_t, &body)?;
                servicer = target;
                st_s = st_t;
                segments.push(Segment {
                    start: t,
                    orbit: target,
                });
            } else {
                (st_s, fuel) = apply_maneuver(&st_s, m, fuel);
                servicer = KeplerOrbit::from_state(&st_s, &body)?;
            }
            next_burn += 1;
        }
        let mut rel_d = (st_s.r - st_t.r).norm() * 1000.0;
        let mut rel_v = (st_s.v - st_t.v).norm() * 1000.0;
        if !docked {
            if grid.fine[k] && docking_check(rel_d, rel_v, thr) {
                docked = true;
                t_dock = Some(t);
                dock = (rel_d, rel_v);
                // the captured target carries the stack
                servicer = target;
                st_s = st_t;
            } else {
                dock = (rel_d, rel_v);
            }
        }
        if docked && t_dock != Some(t) {
            rel_d = 0.0;
            rel_v = 0.0;
        }
        if recording {
            rows.push(TraceRow {
                t,
                fine: grid.fine[k],
                servicer: st_s,
                target: st_t,
                debris: debris.state_at(t)?,
                rel_distance: rel_d,
                rel_speed: rel_v,
                pc_to_date: 0.0,
                pc_predicted: 0.0,
                fuel_remaining: fuel,
                docked,
                deviation: element_deviation(&reference, &st_t, scenario)?,
                reward_to_date: 0.0,
            });
            dock_so_far.push(dock);
        }
    }

    let search = TcaSearch::default();
    let mut events = Vec::new();
    let mut predicted: Vec<Vec<ConjunctionEvent>> = Vec::new();
    for (j, seg) in segments.iter().enumerate() {
        let seg_end = segments.get(j + 1).map_or(scenario.end, |s| s.start);
        let last = j + 1 == segments.len();
        let approaches = closest_approaches(
            &seg.orbit,
            &debris,
            seg.start.add_seconds(-SEGMENT_MARGIN),
            seg_end.add_seconds(SEGMENT_MARGIN),
            &body,
            &search,
            cfg.screen,
        )?;
        for ca in approaches {
            if ca.tca >= seg.start && (ca.tca < seg_end || (last && ca.tca <= seg_end)) {
                events.push(assess(&ca, &scenario.cov)?);
            }
        }
        if let Some(next) = segments.get(j + 1) {
            if let Some(ca) = kink_minimum(&seg.orbit, &next.orbit, &debris, next.start)? {
                events.push(assess(&ca, &scenario.cov)?);
            }
        }
        if recording {
            let ahead = closest_approaches(
                &seg.orbit,
                &debris,
                seg.start,
                scenario.end,
                &body,
                &search,
                cfg.screen,
            )?;
            predicted.push(
                ahead
                    .iter()
                    .map(|ca| assess(ca, &scenario.cov))
                    .collect::<Result<_>>()?,
            );
        }
    }
    events.sort_by_key(|e| e.tca);
    let pc = combine_pc(events.iter().map(|e| e.pc));

    let end_state = target.state_at(scenario.end)?;
    let metrics = EpisodeMetrics {
        pc,
        fuel_used,
        deviation: element_deviation(&reference, &end_state, scenario)?,
        dock_distance: dock.0,
        dock_speed: dock.1,
    };
    let breakdown = reward_total(&metrics, thr, &cfg.weights);

    if let Some(trace) = trace {
        let reference_tca = ballistic_reference_tca(scenario, &predicted[0]);
        let mut seg = 0;
        let mut fuel_spent = 0.0;
        for (row, &(dd, dv)) in rows.iter_mut().zip(&dock_so_far) {
            while seg + 1 < segments.len() && segments[seg + 1].start <= row.t {
                seg += 1;
            }
            row.pc_to_date = combine_pc(events.iter().filter(|e| e.tca <= row.t).map(|e| e.pc));
            row.pc_predicted = combine_pc(
                predicted[seg]
                    .iter()
                    .filter(|e| e.tca >= row.t)
                    .map(|e| e.pc),
            );
            fuel_spent = (scenario.fuel_capacity - row.fuel_remaining).max(fuel_spent);
            let m = EpisodeMetrics {
                pc: row.pc_to_date,
                fuel_used: fuel_spent,
                deviation: row.deviation,
                dock_distance: dd,
                dock_speed: dv,
            };
            row.reward_to_date = reward_total(&m, thr, &cfg.weights).total;
        }
        trace.rows = rows;
        trace.t_dock = t_dock;
        trace.tca = reference_tca;
        trace.events = events;
    }

    Ok(EpisodeSummary {
        breakdown,
        metrics,
        docked,
        t_dock,
        failed: false,
    })
}

/// The highest-Pc conjunction of the unmaneuvered target, falling back to
/// the scenario hint.
fn ballistic_reference_tca(scenario: &Scenario, predicted: &[ConjunctionEvent]) -> Epoch {
    predicted
        .iter()
        .max_by(|a, b| {
            a.pc.total_cmp(&b.pc)
                .then(b.miss_distance.total_cmp(&a.miss_distance))
        })
        .map_or(scenario.tca_hint, |e| e.tca)
}

/// A burn can land exactly on a closest approach: the separation then has a
/// kink at the burn epoch that neither segment sees as an interior minimum.
fn kink_minimum(
    before: &KeplerOrbit,
    after: &KeplerOrbit,
    debris: &KeplerOrbit,
    t: Epoch,
) -> Result<Option<ClosestApproach>> {
    let d = debris.state_at(t)?;
    let a0 = before.state_at(t)?;
    let a1 = after.state_at(t)?;
    let dr = a1.r - d.r;
    let range = dr.norm();
    if range == 0.0 {
        return Ok(None);
    }
    let rate_before = dr.dot(&(a0.v - d.v)) / range;
    let rate_after = dr.dot(&(a1.v - d.v)) / range;
    if rate_before < 0.0 && rate_after > 0.0 {
        Ok(Some(ClosestApproach {
            tca: t,
            miss_distance: range,
            rel_speed: (a1.v - d.v).norm(),
            range_rate: rate_after,
            state_a: a1,
            state_b: d,
        }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::Vector3;
    use crate::environment::Maneuver;
    use crate::scenario::{case_study_conjunction_scenario, case_study_scenario};

    fn idle(s: &Scenario) -> ActionTable {
        ActionTable::new([Maneuver::new(Vector3::zeros(), s.start); 4])
    }

    #[test]
    fn idle_case_study_only_pays_docking_terms() {
        let s = case_study_scenario();
        let out = run_episode(&s, &idle(&s), &EpisodeConfig::default()).unwrap();
        let b = out.summary.breakdown;
        assert!(!out.summary.docked);
        assert_eq!(b.r_fuel, 0.0);
        assert!(b.r_dev > -1e-6, "{b:?}");
        assert!(b.r_dock_pos < -1e4);
        let rows = &out.trace.rows;
        assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
        assert!(rows.iter().all(|r| r.fuel_remaining == s.fuel_capacity));
    }

    #[test]
    fn idle_conjunction_variant_exceeds_threshold() {
        let s = case_study_conjunction_scenario().unwrap();
        let out = run_episode(&s, &idle(&s), &EpisodeConfig::default()).unwrap();
        assert!(
            out.summary.metrics.pc > 1e-4,
            "pc {}",
            out.summary.metrics.pc
        );
        assert!(out.summary.breakdown.total < -1000.0);
        let tca = out.trace.tca;
        assert!((tca.seconds_since(s.tca_hint)).abs() < 1.0);
    }

    #[test]
    fn evaluate_matches_trace_run() {
        let s = case_study_scenario();
        let table = ActionTable::published_random_init();
        let cfg = EpisodeConfig::default();
        let a = run_episode(&s, &table, &cfg).unwrap();
        let b = evaluate(&s, &table, &cfg).unwrap();
        assert_eq!(a.summary, b);
        assert_eq!(a.summary.metrics.fuel_used, table.total_dv());
    }

    #[test]
    fn hyperbolic_burn_gives_sentinel() {
        let s = case_study_scenario();
        let mut table = idle(&s);
        table.rows[0].dv = Vector3::new(3e4, 0.0, 0.0);
        let out = run_episode(&s, &table, &EpisodeConfig::default()).unwrap();
        assert!(out.summary.failed);
        assert_eq!(out.summary.breakdown.total, -1e12);
        assert!(out.trace.failure.is_some());
    }

    #[test]
    fn csv_has_documented_header() {
        let s = case_study_scenario();
        let out = run_episode(&s, &idle(&s), &EpisodeConfig::default()).unwrap();
        let mut buf = Vec::new();
        out.trace
            .write_csv(&mut buf, &["config {}".into()], 6000.0)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# config {}"));
        assert_eq!(
            lines.next().unwrap().split(',').count(),
            TRACE_COLUMNS.len()
        );
        assert_eq!(
            lines.next().unwrap().split(',').count(),
            TRACE_COLUMNS.len()
        );
    }

    #[test]
    fn combine_is_union_probability() {
        assert_eq!(combine_pc([]), 0.0);
        assert!((combine_pc([0.5, 0.5]) - 0.75).abs() < 1e-15);
    }
}
