//! Cross-Entropy training of the four-burn action table.

mod ce;
mod init;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use ce::{
    cross_entropy, percentile, select_elite, CeRun, CeSchedule, IterationStats, Objective,
    PolicyDistribution, MAX_PERCENTILE,
};
pub use init::{init_lambert, init_random, InitBounds};

use crate::environment::{evaluate, ActionTable, EpisodeConfig, PARAMS};
use crate::scenario::Scenario;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Random,
    Lambert,
}

impl std::fmt::Display for InitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitMode::Random => "random",
            InitMode::Lambert => "lambert",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeConfig {
    #[serde(flatten)]
    pub schedule: CeSchedule,
    /// Initial spread of each ΔV component of rows 1–2, m/s.
    pub sigma_dock_dv_mps: f64,
    /// Initial spread of the times of rows 1–2, days.
    pub sigma_dock_t_days: f64,
    /// Initial spread of each ΔV component of rows 3–4, m/s.
    pub sigma_cam_dv_mps: f64,
    /// Initial spread of the times of rows 3–4, days.
    pub sigma_cam_t_days: f64,
    /// Sampled ΔV components are clamped to ±this, m/s.
    pub dv_bound_mps: f64,
}

impl CeConfig {
    /// A Lambert transfer only docks if its burns stay within about a
    /// centimetre per second and a few seconds of the solution, so the
    /// docking rows start far tighter than the avoidance rows.
    pub fn for_init(mode: InitMode) -> Self {
        let (dock, cam) = match mode {
            InitMode::Random => ((1.0, 0.02), (1.0, 0.02)),
            InitMode::Lambert => ((0.02, 2e-5), (5.0, 0.005)),
        };
        CeConfig {
            schedule: CeSchedule::default(),
            sigma_dock_dv_mps: dock.0,
            sigma_dock_t_days: dock.1,
            sigma_cam_dv_mps: cam.0,
            sigma_cam_t_days: cam.1,
            dv_bound_mps: 200.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        for (name, v) in [
            ("sigma_dock_dv_mps", self.sigma_dock_dv_mps),
            ("sigma_dock_t_days", self.sigma_dock_t_days),
            ("sigma_cam_dv_mps", self.sigma_cam_dv_mps),
            ("sigma_cam_t_days", self.sigma_cam_t_days),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and ≥ 0, got {v}"
                )));
            }
        }
        if !(self.dv_bound_mps > 0.0) || !self.dv_bound_mps.is_finite() {
            return Err(Error::InvalidInput(format!(
                "dv_bound_mps must be positive, got {}",
                self.dv_bound_mps
            )));
        }
        Ok(())
    }

    pub fn initial_sigma(&self) -> [f64; PARAMS] {
        std::array::from_fn(|k| match (k / 4 < 2, k % 4 == 3) {
            (true, false) => self.sigma_dock_dv_mps,
            (true, true) => self.sigma_dock_t_days,
            (false, false) => self.sigma_cam_dv_mps,
            (false, true) => self.sigma_cam_t_days,
        })
    }
}

/// Scores flattened action tables with the episode reward.
pub struct TableObjective<'a> {
    pub scenario: &'a Scenario,
    pub episode: &'a EpisodeConfig,
    pub dv_bound: f64,
}

impl Objective for TableObjective<'_> {
    /// Clamps ΔV components and times, then hands the sorted times back to
    /// the rows in order so the table stays nondecreasing.
    fn project(&self, x: &mut [f64]) {
        let (t0, t1) = (self.scenario.start.mjd2000(), self.scenario.end.mjd2000());
        let mut times: Vec<f64> = Vec::with_capacity(x.len() / 4);
        for (k, v) in x.iter_mut().enumerate() {
            if k % 4 == 3 {
                *v = if v.is_nan() { t0 } else { v.clamp(t0, t1) };
                times.push(*v);
            } else {
                *v = if v.is_nan() {
                    0.0
                } else {
                    v.clamp(-self.dv_bound, self.dv_bound)
                };
            }
        }
        times.sort_by(f64::total_cmp);
        for (row, t) in times.into_iter().enumerate() {
            x[4 * row + 3] = t;
        }
    }

    fn evaluate(&self, x: &[f64]) -> Result<Option<f64>> {
        let table = ActionTable::from_params(x)?;
        let s = evaluate(self.scenario, &table, self.episode)?;
        Ok((!s.failed).then_some(s.breakdown.total))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingLog {
    pub iterations: Vec<IterationStats>,
    pub initial_reward: Option<f64>,
    pub best_table: ActionTable,
    pub best_reward: f64,
}

pub const LOG_COLUMNS: [&str; 9] = [
    "iteration",
    "mean_reward",
    "max_reward",
    "elite_threshold",
    "sigma_norm",
    "lr",
    "percentile",
    "best_reward",
    "failures",
];

impl TrainingLog {
    /// One row per iteration after `# ` comment lines. Rewards are ≤ 0;
    /// `sigma_norm` mixes m/s and day components.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", LOG_COLUMNS.join(","))?;
        for r in &self.iterations {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.iteration,
                r.mean_reward,
                r.max_reward,
                r.elite_threshold,
                r.sigma_norm,
                r.lr,
                r.percentile,
                r.best_reward,
                r.failures
            )?;
        }
        Ok(())
    }
}

/// Trains from `init` and returns the best table seen, which may be `init`
/// itself.
pub fn train(
    scenario: &Scenario,
    cfg: &CeConfig,
    episode: &EpisodeConfig,
    init: &ActionTable,
) -> Result<TrainingLog> {
    cfg.validate()?;
    episode.validate()?;
    scenario.validate()?;
    let objective = TableObjective {
        scenario,
        episode,
        dv_bound: cfg.dv_bound_mps,
    };
    let run = cross_entropy(
        &objective,
        &init.to_params(),
        &cfg.initial_sigma(),
        &cfg.schedule,
    )?;
    Ok(TrainingLog {
        iterations: run.log,
        initial_reward: run.initial_reward,
        best_table: ActionTable::from_params(&run.best)?,
        best_reward: run.best_reward,
    })
}
