//! Cross-Entropy search over a real parameter vector with an independent
//! Gaussian per parameter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Something the CE loop can score. Higher is better.
pub trait Objective: Sync {
    /// Maps a raw sample onto the feasible set in place.
    fn project(&self, _x: &mut [f64]) {}

    /// `Ok(None)` marks a failed evaluation, which ranks below every
    /// successful one.
    fn evaluate(&self, x: &[f64]) -> Result<Option<f64>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeSchedule {
    pub iterations: usize,
    pub sessions: usize,
    pub sigma_decay: f64,
    pub learning_decay: f64,
    pub percentile_growth: f64,
    pub initial_percentile: f64,
    pub initial_lr: f64,
    /// Stop after this many iterations without a new best.
    pub patience: usize,
    pub seed: u64,
}

impl Default for CeSchedule {
    fn default() -> Self {
        CeSchedule {
            iterations: 35,
            sessions: 30,
            sigma_decay: 0.98,
            learning_decay: 0.98,
            percentile_growth: 1.005,
            initial_percentile: 70.0,
            initial_lr: 1.0,
            patience: 10,
            seed: 0,
        }
    }
}

pub const MAX_PERCENTILE: f64 = 99.0;

impl CeSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.sessions < 2 {
            return bad(format!(
                "sessions must be at least 2, got {}",
                self.sessions
            ));
        }
        for (name, d) in [
            ("sigma_decay", self.sigma_decay),
            ("learning_decay", self.learning_decay),
        ] {
            if !(d > 0.0 && d <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {d}"));
            }
        }
        if !(self.percentile_growth >= 1.0) || !self.percentile_growth.is_finite() {
            return bad(format!(
                "percentile_growth must be ≥ 1, got {}",
                self.percentile_growth
            ));
        }
        if !(self.initial_percentile > 0.0 && self.initial_percentile < 100.0) {
            return bad(format!(
                "initial_percentile must lie in (0, 100), got {}",
                self.initial_percentile
            ));
        }
        if !(self.initial_lr > 0.0) || !self.initial_lr.is_finite() {
            return bad(format!(
                "initial_lr must be positive, got {}",
                self.initial_lr
            ));
        }
        if self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyDistribution {
    pub mean: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// One row of the training log. Schedule values are those in force after
/// the iteration's update.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub mean_reward: f64,
    pub max_reward: f64,
    pub elite_threshold: f64,
    pub sigma_norm: f64,
    pub lr: f64,
    pub percentile: f64,
    pub best_reward: f64,
    /// Sessions whose evaluation failed.
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CeRun {
    pub best: Vec<f64>,
    pub best_reward: f64,
    pub initial_reward: Option<f64>,
    pub log: Vec<IterationStats>,
    pub distribution: PolicyDistribution,
}

/// Linear-interpolation percentile (the common "linear" definition).
pub fn percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = (p / 100.0).clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if v[lo] == v[hi] {
        return v[lo];
    }
    // failed sessions sit at −∞ and must not poison the interpolation
    if v[lo] == f64::NEG_INFINITY {
        return v[hi];
    }
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Indices whose reward reaches the `p`-th percentile, in index order.
/// Never empty: the first maximal index is always included.
pub fn select_elite(rewards: &[f64], p: f64) -> Vec<usize> {
    assert!(
        !rewards.is_empty(),
        "select_elite needs at least one reward"
    );
    let threshold = percentile(rewards, p);
    let mut elite: Vec<usize> = (0..rewards.len())
        .filter(|&i| rewards[i] >= threshold)
        .collect();
    if elite.is_empty() {
        let best = (0..rewards.len()).fold(0, |b, i| if rewards[i] > rewards[b] { i } else { b });
        elite.push(best);
    }
    elite
}

/// Runs CE from `mean0` with spreads `sigma0`. The projected `mean0` is
/// scored first and competes for best-ever.
pub fn cross_entropy<O: Objective>(
    objective: &O,
    mean0: &[f64],
    sigma0: &[f64],
    schedule: &CeSchedule,
) -> Result<CeRun> {
    schedule.validate()?;
    if mean0.len() != sigma0.len() {
        return Err(Error::InvalidInput(format!(
            "mean has {} entries but sigma has {}",
            mean0.len(),
            sigma0.len()
        )));
    }
    if sigma0.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidInput(
            "sigma entries must be finite and nonnegative".into(),
        ));
    }
    let mut mean = mean0.to_vec();
    objective.project(&mut mean);
    let mut sigma = sigma0.to_vec();
    let mut lr = schedule.initial_lr;
    let mut pct = schedule.initial_percentile;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);

    let initial_reward = objective.evaluate(&mean)?;
    let mut best = mean.clone();
    let mut best_reward = initial_reward.unwrap_or(f64::NEG_INFINITY);
    let mut log = Vec::with_capacity(schedule.iterations);
    let mut stale = 0;

    for iteration in 1..=schedule.iterations {
        let samples: Vec<Vec<f64>> = (0..schedule.sessions)
            .map(|_| {
                let mut x: Vec<f64> = mean
                    .iter()
                    .zip(&sigma)
                    .map(|(m, s)| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + s * z
                    })
                    .collect();
                objective.project(&mut x);
                x
            })
            .collect();
        let scored: Vec<Option<f64>> = samples
            .par_iter()
            .map(|x| objective.evaluate(x))
            .collect::<Result<_>>()?;
        let failures = scored.iter().filter(|r| r.is_none()).count();
        if failures == scored.len() {
            return Err(Error::SolverFailure(format!(
                "all {} sessions failed in iteration {iteration}; best reward so far {best_reward}",
                scored.len()
            )));
        }
        let rewards: Vec<f64> = scored
            .iter()
            .map(|r| r.unwrap_or(f64::NEG_INFINITY))
            .collect();
        let ok: Vec<f64> = rewards.iter().copied().filter(|r| r.is_finite()).collect();

        let elite = select_elite(&rewards, pct);
        let threshold = elite
            .iter()
            .map(|&i| rewards[i])
            .fold(f64::INFINITY, f64::min);
        let arg_max =
            (0..rewards.len()).fold(0, |b, i| if rewards[i] > rewards[b] { i } else { b });
        let max_reward = rewards[arg_max];
        if max_reward > best_reward {
            best_reward = max_reward;
            best = samples[arg_max].clone();
            stale = 0;
        } else {
            stale += 1;
        }

        for (k, m) in mean.iter_mut().enumerate() {
            let elite_mean = elite.iter().map(|&i| samples[i][k]).sum::<f64>() / elite.len() as f64;
            *m += lr * (elite_mean - *m);
        }
        objective.project(&mut mean);
        for s in sigma.iter_mut() {
            *s *= schedule.sigma_decay;
        }
        lr *= schedule.learning_decay;
        pct = (pct * schedule.percentile_growth).min(MAX_PERCENTILE);

        log.push(IterationStats {
            iteration,
            mean_reward: ok.iter().sum::<f64>() / ok.len() as f64,
            max_reward,
            elite_threshold: threshold,
            sigma_norm: sigma.iter().map(|s| s * s).sum::<f64>().sqrt(),
            lr,
            percentile: pct,
            best_reward,
            failures,
        });
        if stale >= schedule.patience {
            break;
        }
    }

    Ok(CeRun {
        best,
        best_reward,
        initial_reward,
        log,
        distribution: PolicyDistribution { mean, sigma },
    })
}
