//! Time of closest approach between two Keplerian objects.

use crate::astro::{CartesianState, CentralBody, Epoch, KeplerOrbit, KeplerianElements, Vector3};
use crate::{Error, Result};

/// Golden-section ratio `(√5 − 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TcaSearch {
    /// Coarse scan step, s.
    pub scan_step: f64,
    /// Golden-section bracket width at termination, s.
    pub time_tol: f64,
}

impl Default for TcaSearch {
    fn default() -> Self {
        TcaSearch {
            scan_step: 10.0,
            time_tol: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosestApproach {
    pub tca: Epoch,
    /// km
    pub miss_distance: f64,
    /// km/s
    pub rel_speed: f64,
    /// d|Δr|/dt at the refined minimum, km/s.
    pub range_rate: f64,
    pub state_a: CartesianState,
    pub state_b: CartesianState,
}

struct Pair<'a> {
    a: &'a KeplerOrbit,
    b: &'a KeplerOrbit,
    t0: Epoch,
    offset_a: f64,
    offset_b: f64,
}

impl<'a> Pair<'a> {
    fn new(a: &'a KeplerOrbit, b: &'a KeplerOrbit, t0: Epoch) -> Self {
        Pair {
            a,
            b,
            t0,
            offset_a: t0.seconds_since(a.epoch()),
            offset_b: t0.seconds_since(b.epoch()),
        }
    }

    fn states(&self, tau: f64) -> Result<(CartesianState, CartesianState)> {
        let mut sa = self.a.state_after(self.offset_a + tau)?;
        let mut sb = self.b.state_after(self.offset_b + tau)?;
        let t = self.t0.add_seconds(tau);
        sa.epoch = t;
        sb.epoch = t;
        Ok((sa, sb))
    }

    fn distance(&self, tau: f64) -> Result<f64> {
        let (sa, sb) = self.states(tau)?;
        Ok((sa.r - sb.r).norm())
    }

    fn golden(&self, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.distance(x1)?;
        let mut f2 = self.distance(x2)?;
        while hi - lo > tol {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.distance(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.distance(x2)?;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Newton on `Δr·Δv = 0`, kept inside `[lo, hi]`.
    fn polish(&self, mut tau: f64, lo: f64, hi: f64, body_mu: f64) -> Result<f64> {
        for _ in 0..20 {
            let (sa, sb) = self.states(tau)?;
            let dr = sa.r - sb.r;
            let dv = sa.v - sb.v;
            let g = dr.dot(&dv);
            let acc = |r: &Vector3| -r * (body_mu / r.norm().powi(3));
            let dg = dv.norm_squared() + dr.dot(&(acc(&sa.r) - acc(&sb.r)));
            if !(dg > 0.0) {
                break;
            }
            let next = (tau - g / dg).clamp(lo, hi);
            let step = (next - tau).abs();
            tau = next;
            if step < 1e-10 {
                break;
            }
        }
        Ok(tau)
    }

    fn refine(
        &self,
        lo: f64,
        hi: f64,
        search: &TcaSearch,
        body_mu: f64,
    ) -> Result<ClosestApproach> {
        let golden = self.golden(lo, hi, search.time_tol)?;
        let polished = self.polish(golden, lo, hi, body_mu)?;
        // keep whichever is closer; Newton can wander on a flat minimum
        let tau = if self.distance(polished)? <= self.distance(golden)? {
            polished
        } else {
            golden
        };
        let (sa, sb) = self.states(tau)?;
        let dr = sa.r - sb.r;
        let dv = sa.v - sb.v;
        let miss = dr.norm();
        Ok(ClosestApproach {
            tca: sa.epoch,
            miss_distance: miss,
            rel_speed: dv.norm(),
            range_rate: if miss > 0.0 { dr.dot(&dv) / miss } else { 0.0 },
            state_a: sa,
            state_b: sb,
        })
    }
}

fn scan(pair: &Pair<'_>, span: f64, step: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = (span / step).ceil().max(1.0) as usize;
    let mut taus = Vec::with_capacity(n + 1);
    let mut dists = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let tau = (k as f64 * step).min(span);
        taus.push(tau);
        dists.push(pair.distance(tau)?);
    }
    Ok((taus, dists))
}

/// Every interior local minimum of the separation in `[t0, t1]` whose
/// scanned distance is below `screen_km`, refined and sorted by time.
pub fn closest_approaches(
    a: &KeplerOrbit,
    b: &KeplerOrbit,
    t0: Epoch,
    t1: Epoch,
    body: &CentralBody,
    search: &TcaSearch,
    screen_km: f64,
) -> Result<Vec<ClosestApproach>> {
    let span = t1.seconds_since(t0);
    if !(span > 0.0) {
        return Ok(Vec::new());
    }
    let pair = Pair::new(a, b, t0);
    let (taus, d) = scan(&pair, span, search.scan_step)?;
    let mut out = Vec::new();
    for k in 1..d.len().saturating_sub(1) {
        if d[k] < d[k - 1] && d[k] <= d[k + 1] && d[k] < screen_km {
            out.push(pair.refine(taus[k - 1], taus[k + 1], search, body.mu)?);
        }
    }
    Ok(out)
}

/// Deepest interior minimum of the separation between two orbits in the
/// window, or `None` when the separation has no interior minimum (for
/// instance when it is constant).
pub fn find_tca_orbits(
    a: &KeplerOrbit,
    b: &KeplerOrbit,
    window: (Epoch, Epoch),
    body: &CentralBody,
    search: &TcaSearch,
) -> Result<Option<ClosestApproach>> {
    let (t0, t1) = window;
    let span = t1.seconds_since(t0);
    if !(span > 0.0) {
        return Err(Error::InvalidInput(format!(
            "empty TCA window [{t0}, {t1}]"
        )));
    }
    let pair = Pair::new(a, b, t0);
    let (taus, d) = scan(&pair, span, search.scan_step)?;
    let (dmin, dmax) = d.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    if dmax < 1e-9 {
        return Err(Error::InvalidInput(
            "objects coincide throughout the window".into(),
        ));
    }
    if dmax - dmin <= 1e-9 * dmax {
        return Ok(None);
    }
    // a fast pass can fall between scan samples and look farther than a
    // slow one, so every sampled dip is refined before comparing
    let mut best: Option<ClosestApproach> = None;
    for k in (1..d.len().saturating_sub(1)).filter(|&k| d[k] < d[k - 1] && d[k] <= d[k + 1]) {
        let ca = pair.refine(taus[k - 1], taus[k + 1], search, body.mu)?;
        if best.is_none_or(|b| ca.miss_distance < b.miss_distance) {
            best = Some(ca);
        }
    }
    Ok(best)
}

/// [`find_tca_orbits`] for two element sets with the default search.
pub fn find_tca(
    a: &KeplerianElements,
    b: &KeplerianElements,
    window: (Epoch, Epoch),
    body: &CentralBody,
) -> Result<Option<ClosestApproach>> {
    let oa = KeplerOrbit::from_elements(a, body)?;
    let ob = KeplerOrbit::from_elements(b, body)?;
    find_tca_orbits(&oa, &ob, window, body, &TcaSearch::default())
}
