//! Probability that the miss vector falls inside the hard-body disk.
//!
//! In the principal frame of the encounter-plane covariance the disk
//! integral separates into an outer Gaussian in x and an inner Gaussian
//! cdf difference in y, which is evaluated in closed form with `erf`. The
//! outer integral is taken in `x = R sin θ` so the chord length
//! `R cos θ` stays smooth at the disk edge, and integrated with adaptive
//! Gauss-Kronrod.

use std::f64::consts::{FRAC_PI_2, PI};

use super::encounter::{Matrix2, Vector2};
use crate::{Error, Result};

const ABS_TOL: f64 = 1e-15;
const REL_TOL: f64 = 1e-13;
const MAX_DEPTH: u32 = 40;

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = kronrod(f, a, b);
    if err <= tol.max(REL_TOL * val.abs()) || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

/// `Φ(u2·√2) − Φ(u1·√2)` for `u1 <= u2`, written to avoid cancellation in
/// either tail.
fn normal_mass(u1: f64, u2: f64) -> f64 {
    if u1 > 0.0 {
        0.5 * (libm::erfc(u1) - libm::erfc(u2))
    } else if u2 < 0.0 {
        0.5 * (libm::erfc(-u2) - libm::erfc(-u1))
    } else {
        0.5 * (libm::erf(u2) - libm::erf(u1))
    }
}

/// Integral of the 2-D Gaussian `N(miss, cov)` over the disk of radius
/// `radius` centred on the origin.
pub fn collision_probability(miss: &Vector2, cov: &Matrix2, radius: f64) -> Result<f64> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!(
            "hard-body radius must be non-negative, got {radius}"
        )));
    }
    if !miss.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("non-finite miss vector".into()));
    }
    let (a, b, c) = (cov[(0, 0)], 0.5 * (cov[(0, 1)] + cov[(1, 0)]), cov[(1, 1)]);
    let det = a * c - b * b;
    if !(a > 0.0 && c > 0.0 && det > 0.0) || (cov[(0, 1)] - cov[(1, 0)]).abs() > 1e-12 * (a + c) {
        return Err(Error::InvalidInput(format!(
            "covariance is not symmetric positive definite: {cov:?}"
        )));
    }
    if radius == 0.0 {
        return Ok(0.0);
    }

    let mean = 0.5 * (a + c);
    let spread = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l_major, l_minor) = (mean + spread, (mean - spread).max(det / (mean + spread)));
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (s, co) = theta.sin_cos();
    // miss vector in the principal frame; x runs along the major axis
    let mx = co * miss.x + s * miss.y;
    let my = -s * miss.x + co * miss.y;
    let (sx, sy) = (l_major.sqrt(), l_minor.sqrt());

    let norm_x = 1.0 / ((2.0 * PI).sqrt() * sx);
    let inv_sy = 1.0 / (std::f64::consts::SQRT_2 * sy);
    let integrand = |t: f64| {
        let (st, ct) = t.sin_cos();
        let x = radius * st;
        let half_chord = radius * ct;
        if half_chord <= 0.0 {
            return 0.0;
        }
        let gx = norm_x * (-0.5 * ((x - mx) / sx).powi(2)).exp();
        if gx == 0.0 {
            return 0.0;
        }
        let py = normal_mass((-half_chord - my) * inv_sy, (half_chord - my) * inv_sy);
        gx * py * half_chord
    };

    let pc = adaptive(&integrand, -FRAC_PI_2, FRAC_PI_2, ABS_TOL, MAX_DEPTH);
    Ok(pc.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint rule in polar coordinates over the disk.
    pub(crate) fn polar_midpoint(
        miss: &Vector2,
        cov: &Matrix2,
        radius: f64,
        nr: usize,
        nt: usize,
    ) -> f64 {
        let inv = cov.try_inverse().unwrap();
        let norm = 1.0 / (2.0 * PI * cov.determinant().sqrt());
        let (dr, dt) = (radius / nr as f64, 2.0 * PI / nt as f64);
        let mut sum = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) * dr;
            for j in 0..nt {
                let t = (j as f64 + 0.5) * dt;
                let d = Vector2::new(r * t.cos(), r * t.sin()) - miss;
                sum += (-0.5 * (d.transpose() * inv * d)[0]).exp() * r;
            }
        }
        sum * norm * dr * dt
    }

    #[test]
    fn centred_isotropic_closed_form() {
        for (sigma, r) in [(0.1, 0.01), (1.0, 1.0), (0.3, 2.0), (2.0, 0.05)] {
            let cov = Matrix2::identity() * (sigma * sigma);
            let pc = collision_probability(&Vector2::zeros(), &cov, r).unwrap();
            let exact = -(-(r * r) / (2.0 * sigma * sigma)).exp_m1();
            assert!(
                (pc - exact).abs() < 1e-10,
                "sigma={sigma} r={r}: {pc} vs {exact}"
            );
        }
    }

    #[test]
    fn far_miss_and_zero_radius() {
        let cov = Matrix2::identity() * 0.01;
        let far = collision_probability(&Vector2::new(1e5, 0.0), &cov, 0.01).unwrap();
        assert!(far < 1e-300);
        assert_eq!(
            collision_probability(&Vector2::new(0.1, 0.0), &cov, 0.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn matches_polar_midpoint_for_correlated_case() {
        let cov = Matrix2::new(0.04, 0.015, 0.015, 0.01);
        let miss = Vector2::new(0.05, -0.12);
        let pc = collision_probability(&miss, &cov, 0.08).unwrap();
        let oracle = polar_midpoint(&miss, &cov, 0.08, 1500, 256);
        assert!((pc - oracle).abs() < 1e-8, "{pc} vs {oracle}");
    }

    #[test]
    fn rejects_bad_covariance() {
        let m = Vector2::zeros();
        assert!(collision_probability(&m, &Matrix2::new(1.0, 2.0, 2.0, 1.0), 0.1).is_err());
        assert!(collision_probability(&m, &Matrix2::new(1.0, 0.1, 0.0, 1.0), 0.1).is_err());
        assert!(collision_probability(&m, &Matrix2::identity(), -1.0).is_err());
    }

    #[test]
    fn threshold_scale_for_default_covariance() {
        // 100 m per object per axis, 10 m radius, head-on hit
        let cov = Matrix2::identity() * 0.02;
        let pc = collision_probability(&Vector2::zeros(), &cov, 0.01).unwrap();
        assert!(pc > 1e-4 && pc < 3e-3);
    }
}
