//! Oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use ooscam::conjunction::{Matrix2, Vector2};
use rand::Rng;

/// Gaussian mass over the disk by brute force: composite Simpson in radius,
/// trapezoid in angle (spectrally accurate for periodic integrands).
pub fn disk_quadrature(miss: &Vector2, cov: &Matrix2, radius: f64) -> f64 {
    const NR: usize = 600;
    const NT: usize = 360;
    let inv = cov.try_inverse().expect("covariance is invertible");
    let norm = 1.0 / (2.0 * std::f64::consts::PI * cov.determinant().sqrt());
    let h = radius / NR as f64;
    let dtheta = std::f64::consts::TAU / NT as f64;
    let ring = |r: f64| -> f64 {
        (0..NT)
            .map(|k| {
                let th = k as f64 * dtheta;
                let d = Vector2::new(r * th.cos(), r * th.sin()) - miss;
                (-0.5 * d.dot(&(inv * d))).exp()
            })
            .sum::<f64>()
            * dtheta
            * r
    };
    let mut s = ring(0.0) + ring(radius);
    for j in 1..NR {
        s += if j % 2 == 1 { 4.0 } else { 2.0 } * ring(j as f64 * h);
    }
    norm * s * h / 3.0
}

/// Random symmetric positive-definite 2×2 covariance and a miss vector a
/// few sigma from the origin, in km.
pub fn random_encounter(rng: &mut impl Rng) -> (Vector2, Matrix2, f64) {
    let s1: f64 = rng.random_range(0.02..0.5);
    let s2: f64 = rng.random_range(0.02..0.5);
    let th: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let (c, s) = (th.cos(), th.sin());
    let rot = Matrix2::new(c, -s, s, c);
    let cov = rot * Matrix2::new(s1 * s1, 0.0, 0.0, s2 * s2) * rot.transpose();
    let scale = s1.max(s2);
    let miss = Vector2::new(
        rng.random_range(-2.0..2.0) * scale,
        rng.random_range(-2.0..2.0) * scale,
    );
    (miss, cov, rng.random_range(0.005..0.05))
}
