//! Hybrid time grid: 0.08 s steps around burns and the planned docking,
//! coarse steps elsewhere, and a sparser stride across the quiet stretch
//! between the docking phase and the collision-avoidance burns.

use serde::{Deserialize, Serialize};

use super::ActionTable;
use crate::astro::Epoch;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Grid points closer than this (s) are merged.
const MERGE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(rename = "fine_step_s")]
    pub fine_step: f64,
    #[serde(rename = "coarse_step_s")]
    pub coarse_step: f64,
    /// Half-width of each fine region, s.
    #[serde(rename = "fine_window_s")]
    pub fine_window: f64,
    /// Step between the end of the docking phase and the first
    /// collision-avoidance burn, s.
    #[serde(rename = "skip_step_s")]
    pub skip_step: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            fine_step: 0.08,
            coarse_step: 10.0,
            fine_window: 60.0,
            skip_step: 60.0,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.fine_step,
            self.coarse_step,
            self.fine_window,
            self.skip_step,
        ]
        .iter()
        .all(|x| *x > 0.0 && x.is_finite());
        if !all_positive {
            return Err(Error::InvalidInput(format!(
                "grid steps and window must be positive: {self:?}"
            )));
        }
        if self.fine_step >= self.coarse_step {
            return Err(Error::InvalidInput(format!(
                "fine step {} s must be smaller than coarse step {} s",
                self.fine_step, self.coarse_step
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    pub epochs: Vec<Epoch>,
    /// True where the point lies inside a fine region.
    pub fine: Vec<bool>,
}

impl TimeGrid {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }
}

#[derive(Clone, Copy)]
struct Point {
    t: Epoch,
    /// Exact points (window ends, burns, TCA hint) win merges.
    exact: bool,
    fine: bool,
}

pub fn build_time_grid(
    scenario: &Scenario,
    table: &ActionTable,
    cfg: &GridConfig,
) -> Result<TimeGrid> {
    cfg.validate()?;
    let (start, end) = (scenario.start, scenario.end);
    let span = end.seconds_since(start);
    let clamp = |t: Epoch| t.max(start).min(end);
    let offset = |t: Epoch| t.seconds_since(start);

    // the planned docking is the second burn
    let mut keys: Vec<Epoch> = table.rows.iter().map(|m| clamp(m.t)).collect();
    keys.push(clamp(table.rows[1].t));
    keys.sort();
    keys.dedup();

    let mut fine_regions: Vec<(f64, f64)> = keys
        .iter()
        .map(|&k| {
            (
                (offset(k) - cfg.fine_window).max(0.0),
                (offset(k) + cfg.fine_window).min(span),
            )
        })
        .collect();
    fine_regions.sort_by(|a, b| a.0.total_cmp(&b.0));
    let in_fine = |s: f64| {
        fine_regions
            .iter()
            .any(|&(a, b)| s >= a - MERGE_TOL && s <= b + MERGE_TOL)
    };

    let skip = {
        let a = offset(clamp(table.rows[1].t)) + cfg.fine_window;
        let b = offset(clamp(table.rows[2].t)) - cfg.fine_window;
        (b > a).then_some((a, b))
    };
    let in_skip = |s: f64| skip.is_some_and(|(a, b)| s > a && s < b);

    let mut pts: Vec<Point> = Vec::new();
    let push_exact = |t: Epoch, pts: &mut Vec<Point>| {
        pts.push(Point {
            t,
            exact: true,
            fine: in_fine(offset(t)),
        })
    };
    push_exact(start, &mut pts);
    push_exact(end, &mut pts);
    if scenario.contains(scenario.tca_hint) {
        push_exact(scenario.tca_hint, &mut pts);
    }
    for &k in &keys {
        push_exact(k, &mut pts);
        let n = (cfg.fine_window / cfg.fine_step).floor() as i64;
        for j in -n..=n {
            if j == 0 {
                continue;
            }
            let t = k.add_seconds(j as f64 * cfg.fine_step);
            if t >= start && t <= end {
                pts.push(Point {
                    t,
                    exact: false,
                    fine: true,
                });
            }
        }
    }

    let n_coarse = (span / cfg.coarse_step).floor() as usize;
    for j in 1..=n_coarse {
        let s = j as f64 * cfg.coarse_step;
        if !in_fine(s) && !in_skip(s) {
            pts.push(Point {
                t: start.add_seconds(s),
                exact: false,
                fine: false,
            });
        }
    }
    if let Some((a, b)) = skip {
        let n = ((b - a) / cfg.skip_step).floor() as usize;
        for j in 0..=n {
            let s = a + j as f64 * cfg.skip_step;
            if s < b {
                pts.push(Point {
                    t: start.add_seconds(s),
                    exact: false,
                    fine: false,
                });
            }
        }
    }

    pts.sort_by_key(|p| p.t);
    let mut merged: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        match merged.last_mut() {
            Some(last) if p.t.seconds_since(last.t) < MERGE_TOL => {
                if p.exact && !last.exact {
                    last.t = p.t;
                    last.exact = true;
                }
                last.fine |= p.fine;
            }
            _ => merged.push(p),
        }
    }

    Ok(TimeGrid {
        epochs: merged.iter().map(|p| p.t).collect(),
        fine: merged.iter().map(|p| p.fine).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::case_study_scenario;

    #[test]
    fn all_burns_at_start() {
        let s = case_study_scenario();
        let mut table = ActionTable::published_random_init();
        for r in table.rows.iter_mut() {
            r.t = s.start;
        }
        let g = build_time_grid(&s, &table, &GridConfig::default()).unwrap();
        let first_coarse = g.fine.iter().position(|f| !f).unwrap();
        assert!(g.epochs[first_coarse].seconds_since(s.start) > 59.0);
        assert!(g.fine[first_coarse..].iter().all(|f| !f));
    }

    #[test]
    fn fine_steps_around_burns() {
        let s = case_study_scenario();
        let table = ActionTable::published_random_init();
        let g = build_time_grid(&s, &table, &GridConfig::default()).unwrap();
        for m in &table.rows {
            let k = g
                .epochs
                .iter()
                .position(|&t| t == m.t)
                .expect("burn epoch on grid");
            for j in k - 5..k + 5 {
                let dt = g.epochs[j + 1].seconds_since(g.epochs[j]);
                assert!((dt - 0.08).abs() < 1e-5, "dt={dt}");
                assert!(g.fine[j]);
            }
        }
        assert!(g.epochs.contains(&s.tca_hint));
        assert_eq!(g.epochs[0], s.start);
        assert_eq!(*g.epochs.last().unwrap(), s.end);
        assert!(g.epochs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grid_is_much_smaller_than_uniform_fine() {
        let s = case_study_scenario();
        let cfg = GridConfig::default();
        let g = build_time_grid(&s, &ActionTable::published_random_init(), &cfg).unwrap();
        let uniform = s.duration_seconds() / cfg.fine_step;
        assert!(
            uniform / g.len() as f64 >= 100.0,
            "ratio {}",
            uniform / g.len() as f64
        );
    }

    #[test]
    fn rejects_inverted_steps() {
        let cfg = GridConfig {
            fine_step: 20.0,
            ..GridConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
