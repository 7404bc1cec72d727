//! Penalty shaping. Every component is ≤ 0 and training maximizes the sum.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Floor applied to Pc before taking its logarithm.
pub const PC_FLOOR: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardThresholds {
    pub p_t: f64,
    /// Fuel used, units (1 unit = 1 m/s of ΔV).
    #[serde(rename = "fuel_units")]
    pub fuel: f64,
    #[serde(rename = "dev_a_m")]
    pub dev_a: f64,
    pub dev_e: f64,
    #[serde(rename = "dev_i_rad")]
    pub dev_i: f64,
    #[serde(rename = "dev_raan_rad")]
    pub dev_raan: f64,
    #[serde(rename = "dev_argp_rad")]
    pub dev_argp: f64,
    #[serde(rename = "dock_pos_m")]
    pub dock_pos: f64,
    #[serde(rename = "dock_vel_mps")]
    pub dock_vel: f64,
}

impl Default for RewardThresholds {
    fn default() -> Self {
        RewardThresholds {
            p_t: 1e-4,
            fuel: 500.0,
            dev_a: 100.0,
            dev_e: 0.01,
            dev_i: 0.01,
            dev_raan: 0.01,
            dev_argp: 0.01,
            dock_pos: 250.0,
            dock_vel: 5.0,
        }
    }
}

impl RewardThresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.p_t,
            self.fuel,
            self.dev_a,
            self.dev_e,
            self.dev_i,
            self.dev_raan,
            self.dev_argp,
            self.dock_pos,
            self.dock_vel,
        ];
        if all.iter().all(|x| *x > 0.0 && x.is_finite()) && self.p_t < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "reward thresholds must be positive: {self:?}"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub w_pc: f64,
    pub w_fuel: f64,
    /// Applied to each of the five element deviations.
    pub w_dev: f64,
    pub w_dock_pos: f64,
    pub w_dock_vel: f64,
    /// Slope multiplier above a threshold.
    pub steepening: f64,
    /// ELU input scale for the Pc term.
    pub beta: f64,
    /// Total assigned to an episode that fails numerically.
    pub failure_reward: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            w_pc: 1000.0,
            w_fuel: 10.0,
            w_dev: 10.0,
            w_dock_pos: 10.0,
            w_dock_vel: 10.0,
            steepening: 10.0,
            beta: 2.0,
            failure_reward: -1e12,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [
            self.w_pc,
            self.w_fuel,
            self.w_dev,
            self.w_dock_pos,
            self.w_dock_vel,
            self.steepening,
            self.beta,
        ];
        if !w.iter().all(|x| *x >= 0.0 && x.is_finite()) || self.beta == 0.0 {
            return Err(Error::InvalidInput(format!(
                "reward weights must be nonnegative and beta positive: {self:?}"
            )));
        }
        if !(self.failure_reward <= 0.0) || !self.failure_reward.is_finite() {
            return Err(Error::InvalidInput(
                "failure reward must be finite and ≤ 0".into(),
            ));
        }
        Ok(())
    }
}

fn elu(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        z.exp_m1()
    }
}

/// Collision-probability penalty: `−w_p·(ELU(β·log10(pc/p_t)) + 1)`.
pub fn reward_pc(pc: f64, thr: &RewardThresholds, w: &RewardWeights) -> f64 {
    let x = (pc.max(PC_FLOOR) / thr.p_t).log10();
    -w.w_pc * (elu(w.beta * x) + 1.0)
}

/// Linear penalty `−w·x/thr` up to the threshold, `s` times steeper beyond.
pub fn penalty(x: f64, thr: f64, w: f64, s: f64) -> f64 {
    let u = x.abs() / thr;
    if u <= 1.0 {
        -w * u
    } else {
        -w * (1.0 + s * (u - 1.0))
    }
}

/// Absolute deviations of the target's osculating elements from the
/// reference; angles wrapped into `[0, π]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    #[serde(rename = "a_m")]
    pub a: f64,
    pub e: f64,
    #[serde(rename = "i_rad")]
    pub i: f64,
    #[serde(rename = "raan_rad")]
    pub raan: f64,
    #[serde(rename = "argp_rad")]
    pub argp: f64,
}

impl Deviation {
    pub fn within(&self, thr: &RewardThresholds) -> bool {
        self.a < thr.dev_a
            && self.e < thr.dev_e
            && self.i < thr.dev_i
            && self.raan < thr.dev_raan
            && self.argp < thr.dev_argp
    }
}

/// Scalar episode outcomes the reward is built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeMetrics {
    pub pc: f64,
    /// units
    pub fuel_used: f64,
    pub deviation: Deviation,
    /// m
    pub dock_distance: f64,
    /// m/s
    pub dock_speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_pc: f64,
    pub r_fuel: f64,
    pub r_dev: f64,
    pub r_dock_pos: f64,
    pub r_dock_vel: f64,
    pub total: f64,
}

impl RewardBreakdown {
    fn from_parts(r_pc: f64, r_fuel: f64, r_dev: f64, r_dock_pos: f64, r_dock_vel: f64) -> Self {
        RewardBreakdown {
            r_pc,
            r_fuel,
            r_dev,
            r_dock_pos,
            r_dock_vel,
            total: r_pc + r_fuel + r_dev + r_dock_pos + r_dock_vel,
        }
    }

    /// Worst-case breakdown for an aborted episode, spread evenly.
    pub fn failure(w: &RewardWeights) -> Self {
        let part = w.failure_reward / 5.0;
        RewardBreakdown {
            r_pc: part,
            r_fuel: part,
            r_dev: part,
            r_dock_pos: part,
            r_dock_vel: part,
            total: w.failure_reward,
        }
    }
}

pub fn reward_total(
    m: &EpisodeMetrics,
    thr: &RewardThresholds,
    w: &RewardWeights,
) -> RewardBreakdown {
    let s = w.steepening;
    let d = &m.deviation;
    let r_dev = penalty(d.a, thr.dev_a, w.w_dev, s)
        + penalty(d.e, thr.dev_e, w.w_dev, s)
        + penalty(d.i, thr.dev_i, w.w_dev, s)
        + penalty(d.raan, thr.dev_raan, w.w_dev, s)
        + penalty(d.argp, thr.dev_argp, w.w_dev, s);
    RewardBreakdown::from_parts(
        reward_pc(m.pc, thr, w),
        penalty(m.fuel_used, thr.fuel, w.w_fuel, s),
        r_dev,
        penalty(m.dock_distance, thr.dock_pos, w.w_dock_pos, s),
        penalty(m.dock_speed, thr.dock_vel, w.w_dock_vel, s),
    )
}

/// Docking succeeds when both the separation (m) and the relative speed
/// (m/s) are within their thresholds.
pub fn docking_check(rel_pos: f64, rel_vel: f64, thr: &RewardThresholds) -> bool {
    rel_pos <= thr.dock_pos && rel_vel <= thr.dock_vel
}
