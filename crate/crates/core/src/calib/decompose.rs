//! Closed-form recovery of a single-focal pinhole camera from a ground-plane
//! homography, assuming zero skew, square pixels, and the principal point at
//! the image center.

use nalgebra::{Matrix3, Vector3};

use super::CalibError;
use crate::camera::{CameraParams, ImageSize};

/// Composes the ground-plane homography K [r1 r2 t] of a camera.
pub fn ground_homography(cam: &CameraParams) -> Matrix3<f64> {
    let r = &cam.rotation;
    let mut m = Matrix3::zeros();
    m.set_column(0, &r.column(0).into_owned());
    m.set_column(1, &r.column(1).into_owned());
    m.set_column(2, &cam.translation);
    cam.k_matrix() * m
}

/// Recovers f, R, t from a homography. The focal is solved by combining the
/// two orthonormality constraints on K⁻¹h₁, K⁻¹h₂ in least squares, r₃ is
/// the cross product, R is projected to the nearest rotation, and the sign
/// is fixed so the camera sits above the ground plane.
pub fn decompose_homography(
    h: &Matrix3<f64>,
    image: ImageSize,
) -> Result<CameraParams, CalibError> {
    let h = h / h.norm();
    let (cx, cy) = image.center();
    // Shift the principal point out of each column: ĥ = [x - cx w, y - cy w, w].
    let shifted = |c: usize| {
        Vector3::new(
            h[(0, c)] - cx * h[(2, c)],
            h[(1, c)] - cy * h[(2, c)],
            h[(2, c)],
        )
    };
    let h1 = shifted(0);
    let h2 = shifted(1);
    let h3 = shifted(2);

    // Constraints on x = 1/f²:  a·x + b = 0.
    let a1 = h1.x * h2.x + h1.y * h2.y;
    let b1 = h1.z * h2.z;
    let a2 = h1.x * h1.x + h1.y * h1.y - h2.x * h2.x - h2.y * h2.y;
    let b2 = h1.z * h1.z - h2.z * h2.z;
    let denom = a1 * a1 + a2 * a2;
    let scale = (b1 * b1 + b2 * b2).max(1.0);
    if denom <= 1e-18 * scale {
        return Err(CalibError::FocalIndeterminate);
    }
    let x = -(a1 * b1 + a2 * b2) / denom;
    if !(x > 0.0) || !x.is_finite() {
        return Err(CalibError::NoValidFocal);
    }
    let f = 1.0 / x.sqrt();

    let m1 = Vector3::new(h1.x / f, h1.y / f, h1.z);
    let m2 = Vector3::new(h2.x / f, h2.y / f, h2.z);
    let m3 = Vector3::new(h3.x / f, h3.y / f, h3.z);
    let mut lambda = 1.0 / m1.norm();

    // Flipping lambda flips r1, r2, t and thereby the camera height
    // C_z = -(r3 · t); choose the above-ground branch.
    let r3_dir = m1.cross(&m2);
    let height = -(r3_dir.dot(&m3)) * lambda * lambda * lambda;
    if height == 0.0 || !height.is_finite() {
        return Err(CalibError::BehindGround);
    }
    if height < 0.0 {
        lambda = -lambda;
    }
    let r1 = m1 * lambda;
    let r2 = m2 * lambda;
    let t = m3 * lambda;
    let r3 = r1.cross(&r2);

    let mut rot = Matrix3::zeros();
    rot.set_column(0, &r1);
    rot.set_column(1, &r2);
    rot.set_column(2, &r3);
    let rot = nearest_rotation(&rot);

    Ok(CameraParams::new(f, f, cx, cy, rot, t))
}

/// Polar projection onto SO(3) via SVD.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let det = (u * v_t).determinant();
    let mut d = Matrix3::identity();
    d[(2, 2)] = det.signum();
    u * d * v_t
}
