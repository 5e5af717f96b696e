//! Pinhole camera parameters (world → camera convention).
//!
//! World frame matches [`crate::pitch`]: origin at pitch center, z up.
//! Camera frame: x right, y down, z along the optical axis.

use nalgebra::{Matrix3, Matrix3x4, Point3, Vector3};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("focal lengths must be positive (fx={fx}, fy={fy})")]
    NonPositiveFocal { fx: f64, fy: f64 },
    #[error("rotation is not orthonormal (|R^T R - I| = {deviation})")]
    NotARotation { deviation: f64 },
    #[error("camera center below the ground plane (z = {z})")]
    BelowGround { z: f64 },
}

/// Image size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl ImageSize {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }

    /// Half-open in-frame test used for keypoint visibility.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64
    }
}

/// Intrinsics + extrinsics of a zero-skew pinhole camera.
///
/// `rotation` and `translation` map world points into the camera frame:
/// `x_cam = R x_world + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraParams {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub skew: f64,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl CameraParams {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
    ) -> Self {
        Self {
            fx,
            fy,
            cx,
            cy,
            skew: 0.0,
            rotation,
            translation,
        }
    }

    pub fn k_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.fx, self.skew, self.cx, //
            0.0, self.fy, self.cy, //
            0.0, 0.0, 1.0,
        )
    }

    pub fn rt_matrix(&self) -> Matrix3x4<f64> {
        let mut rt = Matrix3x4::zeros();
        rt.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        rt.set_column(3, &self.translation);
        rt
    }

    /// Camera center in world coordinates, `C = -R^T t`.
    pub fn camera_center(&self) -> Point3<f64> {
        Point3::from(-(self.rotation.transpose() * self.translation))
    }

    pub fn validate(&self) -> Result<(), CameraError> {
        if !(self.fx > 0.0) || !(self.fy > 0.0) {
            return Err(CameraError::NonPositiveFocal {
                fx: self.fx,
                fy: self.fy,
            });
        }
        let dev_ortho = (self.rotation.transpose() * self.rotation - Matrix3::identity()).norm();
        let dev_det = (self.rotation.determinant() - 1.0).abs();
        if dev_ortho > 1e-8 || dev_det > 1e-8 {
            return Err(CameraError::NotARotation {
                deviation: dev_ortho.max(dev_det),
            });
        }
        let c = self.camera_center();
        if !(c.z > 0.0) {
            return Err(CameraError::BelowGround { z: c.z });
        }
        Ok(())
    }

    /// Look-at constructor: camera at `center` pointing its optical axis at
    /// `target`, world +z treated as up.
    pub fn look_at(
        focal: f64,
        image: ImageSize,
        center: Point3<f64>,
        target: Point3<f64>,
    ) -> Self {
        let forward = (target - center).normalize();
        let up = Vector3::new(0.0, 0.0, 1.0);
        let right = forward.cross(&up).normalize();
        let down = forward.cross(&right);
        let rotation = Matrix3::from_rows(&[
            right.transpose(),
            down.transpose(),
            forward.transpose(),
        ]);
        let translation = -(rotation * center.coords);
        let (cx, cy) = image.center();
        Self::new(focal, focal, cx, cy, rotation, translation)
    }

    /// K serialized as 3×3 row-major nested arrays.
    pub fn k_rows(&self) -> [[f64; 3]; 3] {
        let k = self.k_matrix();
        [
            [k[(0, 0)], k[(0, 1)], k[(0, 2)]],
            [k[(1, 0)], k[(1, 1)], k[(1, 2)]],
            [k[(2, 0)], k[(2, 1)], k[(2, 2)]],
        ]
    }

    /// [R|t] serialized as 3×4 row-major nested arrays.
    pub fn rt_rows(&self) -> [[f64; 4]; 3] {
        let rt = self.rt_matrix();
        [
            [rt[(0, 0)], rt[(0, 1)], rt[(0, 2)], rt[(0, 3)]],
            [rt[(1, 0)], rt[(1, 1)], rt[(1, 2)], rt[(1, 3)]],
            [rt[(2, 0)], rt[(2, 1)], rt[(2, 2)], rt[(2, 3)]],
        ]
    }

    pub fn from_k_rt(k: &[[f64; 3]; 3], rt: &[[f64; 4]; 3]) -> Self {
        let rotation = Matrix3::new(
            rt[0][0], rt[0][1], rt[0][2], //
            rt[1][0], rt[1][1], rt[1][2], //
            rt[2][0], rt[2][1], rt[2][2],
        );
        let translation = Vector3::new(rt[0][3], rt[1][3], rt[2][3]);
        Self {
            fx: k[0][0],
            fy: k[1][1],
            cx: k[0][2],
            cy: k[1][2],
            skew: k[0][1],
            rotation,
            translation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn camera_center_roundtrip() {
        let c = Point3::new(3.0, -60.0, 15.0);
        let cam = CameraParams::look_at(1000.0, ImageSize::new(1920, 1080), c, Point3::origin());
        assert!((cam.camera_center() - c).norm() < 1e-9);
        cam.validate().unwrap();
    }

    #[test]
    fn look_at_points_axis_at_target() {
        let cam = CameraParams::look_at(
            1200.0,
            ImageSize::new(1920, 1080),
            Point3::new(0.0, -60.0, 20.0),
            Point3::new(0.0, 0.0, 0.0),
        );
        // Target must land on the optical axis: x_cam = y_cam = 0.
        let x = cam.rotation * Vector3::zeros() + cam.translation;
        assert!(x.x.abs() < 1e-9 && x.y.abs() < 1e-9 && x.z > 0.0);
    }

    #[test]
    fn validate_rejects_underground_camera() {
        let mut cam = CameraParams::look_at(
            1000.0,
            ImageSize::new(1920, 1080),
            Point3::new(0.0, -60.0, 15.0),
            Point3::origin(),
        );
        cam.translation = -(cam.rotation * Vector3::new(0.0, -60.0, -2.0));
        assert!(matches!(
            cam.validate(),
            Err(CameraError::BelowGround { .. })
        ));
    }

    #[test]
    fn k_rt_serialization_roundtrip() {
        let cam = CameraParams::look_at(
            1500.0,
            ImageSize::new(960, 540),
            Point3::new(5.0, -70.0, 18.0),
            Point3::new(1.0, 2.0, 0.0),
        );
        let back = CameraParams::from_k_rt(&cam.k_rows(), &cam.rt_rows());
        assert_eq!(cam, back);
    }
}
