use crate::astro::{CartesianState, Vector3};
use crate::{Error, Result};

use super::CovarianceSpec;

pub type Vector2 = nalgebra::Vector2<f64>;
pub type Matrix2 = nalgebra::Matrix2<f64>;
type Matrix3 = nalgebra::Matrix3<f64>;

/// Relative speeds below this break the straight-line encounter model.
const MIN_REL_SPEED: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncounterPlane {
    /// Miss vector of A relative to B in the plane, km.
    pub miss_2d: Vector2,
    /// Combined position covariance in the plane, km².
    pub cov_2d: Matrix2,
    /// In-plane axes in inertial coordinates; the plane normal is the
    /// relative velocity direction.
    pub x_axis: Vector3,
    pub y_axis: Vector3,
}

fn rtn_covariance(st: &CartesianState, sigma: &[f64; 3]) -> Matrix3 {
    let r_hat = st.r.normalize();
    let n_hat = st.r.cross(&st.v).normalize();
    let t_hat = n_hat.cross(&r_hat);
    let frame = Matrix3::from_columns(&[r_hat, t_hat, n_hat]);
    let d = Matrix3::from_diagonal(&Vector3::new(
        sigma[0].powi(2),
        sigma[1].powi(2),
        sigma[2].powi(2),
    ));
    frame * d * frame.transpose()
}

fn any_perpendicular(u: &Vector3) -> Vector3 {
    let axis = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Vector3::x()
    } else if u.y.abs() <= u.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    u.cross(&axis).normalize()
}

pub fn project_encounter_plane(
    a: &CartesianState,
    b: &CartesianState,
    cov: &CovarianceSpec,
) -> Result<EncounterPlane> {
    let dr = a.r - b.r;
    let dv = a.v - b.v;
    let speed = dv.norm();
    if !(speed > MIN_REL_SPEED) {
        return Err(Error::EncounterModelInvalid(format!(
            "relative speed {speed:e} km/s too small for a short-term encounter"
        )));
    }
    let normal = dv / speed;
    let in_plane = dr - normal * dr.dot(&normal);
    let in_plane_norm = in_plane.norm();
    let x_axis = if in_plane_norm > 0.0 && in_plane_norm > 1e-12 * dr.norm() {
        in_plane / in_plane_norm
    } else {
        any_perpendicular(&normal)
    };
    let y_axis = normal.cross(&x_axis);

    let c3 = rtn_covariance(a, &cov.sigma_primary) + rtn_covariance(b, &cov.sigma_secondary);
    let proj = nalgebra::Matrix2x3::from_rows(&[x_axis.transpose(), y_axis.transpose()]);
    let mut c2 = proj * c3 * proj.transpose();
    let off = 0.5 * (c2[(0, 1)] + c2[(1, 0)]);
    c2[(0, 1)] = off;
    c2[(1, 0)] = off;

    Ok(EncounterPlane {
        miss_2d: Vector2::new(dr.dot(&x_axis), dr.dot(&y_axis)),
        cov_2d: c2,
        x_axis,
        y_axis,
    })
}
