//! C interface to the `ooscam` planner.
//!
//! Scenarios and action tables cross the boundary as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns an [`OoscamStatus`]; on failure the message is kept per thread and
//! can be copied out with [`ooscam_last_error_message`]. Vectors are in km
//! and km/s, ΔV in m/s and epochs in mjd2000 days.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use ooscam::astro::{kepler, lambert, CentralBody, Vector3};
use ooscam::conjunction::{collision_probability, Matrix2, Vector2};
use ooscam::environment::{evaluate, ActionTable, EpisodeConfig, PARAMS};
use ooscam::output::BUILD_ID;
use ooscam::scenario::{
    case_study_conjunction_scenario, case_study_scenario, scenario_from_json, scenario_to_json,
    Scenario,
};
use ooscam::training::{init_lambert, init_random, train, CeConfig, InitBounds, InitMode};
use ooscam::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OoscamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    SolverFailure = 3,
    UnsupportedOrbit = 4,
    EncounterModelInvalid = 5,
    InfeasibleGeometry = 6,
    Schema = 7,
    Io = 8,
    Internal = 9,
}

impl From<&Error> for OoscamStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::SolverFailure(_) => OoscamStatus::SolverFailure,
            Error::UnsupportedOrbit(_) => OoscamStatus::UnsupportedOrbit,
            Error::EncounterModelInvalid(_) => OoscamStatus::EncounterModelInvalid,
            Error::InvalidInput(_) => OoscamStatus::InvalidInput,
            Error::InfeasibleGeometry(_) => OoscamStatus::InfeasibleGeometry,
            Error::Schema { .. } => OoscamStatus::Schema,
            Error::Io { .. } => OoscamStatus::Io,
        }
    }
}

/// How [`ooscam_train`] builds its starting table.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OoscamInitMode {
    Random = 0,
    Lambert = 1,
}

/// Opaque scenario handle.
pub struct OoscamScenario(Scenario);

/// Opaque four-row action table handle.
pub struct OoscamTable(ActionTable);

/// Reward breakdown and headline metrics of one episode.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct OoscamEpisodeResult {
    pub r_pc: f64,
    pub r_fuel: f64,
    pub r_dev: f64,
    pub r_dock_pos: f64,
    pub r_dock_vel: f64,
    pub total: f64,
    pub pc: f64,
    pub fuel_used: f64,
    /// 1 when the servicer docked.
    pub docked: c_int,
    /// Docking epoch, NaN when undocked.
    pub t_dock_mjd2000: f64,
    /// 1 when a numerical failure ended the episode early.
    pub failed: c_int,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard<F: FnOnce() -> Result<(), (OoscamStatus, String)>>(f: F) -> OoscamStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OoscamStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OoscamStatus::Internal
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (OoscamStatus, String)>;
}

impl<T> Lift<T> for ooscam::Result<T> {
    fn lift(self) -> Result<T, (OoscamStatus, String)> {
        self.map_err(|e| (OoscamStatus::from(&e), e.to_string()))
    }
}

fn null(what: &str) -> (OoscamStatus, String) {
    (OoscamStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read3(p: *const f64, what: &str) -> Result<Vector3, (OoscamStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(Vector3::new(s[0], s[1], s[2]))
}

unsafe fn write3(p: *mut f64, v: &Vector3) {
    std::slice::from_raw_parts_mut(p, 3).copy_from_slice(v.as_slice());
}

fn boxed<T>(value: T, out: *mut *mut T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Build identifier as a NUL-terminated string owned by the library.
#[no_mangle]
pub extern "C" fn ooscam_version() -> *const c_char {
    static ID: OnceLock<CString> = OnceLock::new();
    ID.get_or_init(|| CString::new(BUILD_ID).unwrap_or_default())
        .as_ptr()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// NUL-terminated) and returns the full length including the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ooscam_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Eccentric anomaly for mean anomaly `mean_anomaly` (rad) and eccentricity
/// `e` in [0, 1).
///
/// # Safety
/// `out` must be a valid pointer to one double.
#[no_mangle]
pub unsafe extern "C" fn ooscam_solve_kepler(
    mean_anomaly: f64,
    e: f64,
    out: *mut f64,
) -> OoscamStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = kepler::solve_kepler(mean_anomaly, e).lift()?;
        Ok(())
    })
}

/// Single-revolution Lambert transfer about the Earth from `r0` to `r1` in
/// `dt` seconds. `prograde` nonzero selects the transfer with h_z ≥ 0.
///
/// # Safety
/// `r0`, `r1` must point to 3 readable doubles, `v0_out`, `v1_out` to 3
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ooscam_lambert(
    r0: *const f64,
    r1: *const f64,
    dt: f64,
    prograde: c_int,
    v0_out: *mut f64,
    v1_out: *mut f64,
) -> OoscamStatus {
    guard(|| {
        let (a, b) = (read3(r0, "r0")?, read3(r1, "r1")?);
        if v0_out.is_null() || v1_out.is_null() {
            return Err(null("velocity output"));
        }
        let sol = lambert(&a, &b, dt, &CentralBody::EARTH, prograde != 0).lift()?;
        write3(v0_out, &sol.v0);
        write3(v1_out, &sol.v1);
        Ok(())
    })
}

/// Probability that a Gaussian miss with mean (`miss_x`, `miss_y`) km and
/// row-major 2×2 covariance `cov` (km²) falls inside a disk of `radius` km.
///
/// # Safety
/// `cov` must point to 4 readable doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn ooscam_collision_probability(
    miss_x: f64,
    miss_y: f64,
    cov: *const f64,
    radius: f64,
    out: *mut f64,
) -> OoscamStatus {
    guard(|| {
        if cov.is_null() || out.is_null() {
            return Err(null("cov or out"));
        }
        let c = std::slice::from_raw_parts(cov, 4);
        let m = Matrix2::new(c[0], c[1], c[2], c[3]);
        *out = collision_probability(&Vector2::new(miss_x, miss_y), &m, radius).lift()?;
        Ok(())
    })
}

/// The published case study.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with
/// [`ooscam_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn ooscam_scenario_case_study(out: *mut *mut OoscamScenario) -> OoscamStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        boxed(OoscamScenario(case_study_scenario()), out);
        Ok(())
    })
}

/// The case study with a colliding debris object.
///
/// # Safety
/// As [`ooscam_scenario_case_study`].
#[no_mangle]
pub unsafe extern "C" fn ooscam_scenario_case_study_conjunction(
    out: *mut *mut OoscamScenario,
) -> OoscamStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        boxed(
            OoscamScenario(case_study_conjunction_scenario().lift()?),
            out,
        );
        Ok(())
    })
}

/// Parses a scenario file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ooscam_scenario_from_json(
    json: *const c_char,
    out: *mut *mut OoscamScenario,
) -> OoscamStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null("json or out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            (
                OoscamStatus::InvalidInput,
                format!("scenario JSON is not UTF-8: {e}"),
            )
        })?;
        boxed(
            OoscamScenario(scenario_from_json(text, Path::new("<ffi>")).lift()?),
            out,
        );
        Ok(())
    })
}

/// Serializes a scenario; release the string with [`ooscam_string_free`].
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ooscam_scenario_to_json(
    scenario: *const OoscamScenario,
    out: *mut *mut c_char,
) -> OoscamStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CString::new(scenario_to_json(&s.0, None))
            .map_err(|_| (OoscamStatus::Internal, "scenario JSON contains NUL".into()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// Start and end of the scenario window, mjd2000.
///
/// # Safety
/// `scenario` must be a live handle; `start`, `end` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ooscam_scenario_window(
    scenario: *const OoscamScenario,
    start: *mut f64,
    end: *mut f64,
) -> OoscamStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if start.is_null() || end.is_null() {
            return Err(null("start or end"));
        }
        *start = s.0.start.mjd2000();
        *end = s.0.end.mjd2000();
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ooscam_scenario_free(scenario: *mut OoscamScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ooscam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a table from 16 values: (dv_x, dv_y, dv_z [m/s], t [mjd2000]) per
/// row, rows in order.
///
/// # Safety
/// `params` must point to 16 readable doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ooscam_table_from_params(
    params: *const f64,
    out: *mut *mut OoscamTable,
) -> OoscamStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return Err(null("params or out"));
        }
        let table = ActionTable::from_params(std::slice::from_raw_parts(params, PARAMS)).lift()?;
        table.validate(None).lift()?;
        boxed(OoscamTable(table), out);
        Ok(())
    })
}

/// Writes the 16 table values in the layout of [`ooscam_table_from_params`].
///
/// # Safety
/// `table` must be a live handle and `out` point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ooscam_table_params(
    table: *const OoscamTable,
    out: *mut f64,
) -> OoscamStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, PARAMS).copy_from_slice(&t.0.to_params());
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ooscam_table_free(table: *mut OoscamTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Runs one episode with the default environment configuration.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ooscam_run_episode(
    scenario: *const OoscamScenario,
    table: *const OoscamTable,
    out: *mut OoscamEpisodeResult,
) -> OoscamStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = evaluate(&s.0, &t.0, &EpisodeConfig::default()).lift()?;
        let b = r.breakdown;
        *out = OoscamEpisodeResult {
            r_pc: b.r_pc,
            r_fuel: b.r_fuel,
            r_dev: b.r_dev,
            r_dock_pos: b.r_dock_pos,
            r_dock_vel: b.r_dock_vel,
            total: b.total,
            pc: r.metrics.pc,
            fuel_used: r.metrics.fuel_used,
            docked: c_int::from(r.docked),
            t_dock_mjd2000: r.t_dock.map_or(f64::NAN, |t| t.mjd2000()),
            failed: c_int::from(r.failed),
        };
        Ok(())
    })
}

/// Trains a table with the default Cross-Entropy configuration for `mode`.
/// `iterations` and `sessions` override the defaults when nonzero. The
/// Lambert transfer departs at the scenario start and arrives 0.0704 days
/// later.
///
/// # Safety
/// `scenario` must be a live handle; `best_out` and `reward_out` valid
/// pointers. The returned table is released with [`ooscam_table_free`].
#[no_mangle]
pub unsafe extern "C" fn ooscam_train(
    scenario: *const OoscamScenario,
    mode: OoscamInitMode,
    seed: u64,
    iterations: u32,
    sessions: u32,
    best_out: *mut *mut OoscamTable,
    reward_out: *mut f64,
) -> OoscamStatus {
    guard(|| {
        let s = &scenario.as_ref().ok_or_else(|| null("scenario"))?.0;
        if best_out.is_null() || reward_out.is_null() {
            return Err(null("best_out or reward_out"));
        }
        let init_mode = match mode {
            OoscamInitMode::Random => InitMode::Random,
            OoscamInitMode::Lambert => InitMode::Lambert,
        };
        let mut cfg = CeConfig::for_init(init_mode);
        cfg.schedule.seed = seed;
        if iterations > 0 {
            cfg.schedule.iterations = iterations as usize;
        }
        if sessions > 0 {
            cfg.schedule.sessions = sessions as usize;
        }
        let bounds = InitBounds::default();
        let init = match init_mode {
            InitMode::Random => init_random(s, &bounds, seed),
            InitMode::Lambert => {
                let t1 = s.start;
                init_lambert(
                    s,
                    t1,
                    t1.add_days(ooscam::cli::DEFAULT_LAMBERT_DT_DAYS),
                    &bounds,
                    seed,
                )
            }
        }
        .lift()?;
        let log = train(s, &cfg, &EpisodeConfig::default(), &init).lift()?;
        *reward_out = log.best_reward;
        boxed(OoscamTable(log.best_table), best_out);
        Ok(())
    })
}
