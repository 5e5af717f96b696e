//! Forward projection of the pitch model into images and ground-plane
//! back-projection of image points.

use std::collections::BTreeMap;

use nalgebra::{Point2, Point3, Vector3};

use crate::camera::{CameraParams, ImageSize};
use crate::pitch::{ElementGeometry, PitchElement, PitchModel};

/// Keypoints in pixel coordinates, line polylines in normalized [0,1]²
/// coordinates clipped to the frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProjectedAnnotations {
    pub keypoints: BTreeMap<u32, Point2<f64>>,
    pub lines: BTreeMap<String, Vec<Point2<f64>>>,
}

/// Position on the pitch ground plane, meters, z = 0 implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchPosition {
    pub x: f64,
    pub y: f64,
}

/// Projects a world point; `None` when the point is behind the camera.
pub fn project_point(cam: &CameraParams, point: &Point3<f64>) -> Option<Point2<f64>> {
    let x = cam.rotation * point.coords + cam.translation;
    if x.z <= 0.0 {
        return None;
    }
    Some(Point2::new(
        cam.fx * x.x / x.z + cam.skew * x.y / x.z + cam.cx,
        cam.fy * x.y / x.z + cam.cy,
    ))
}

/// Back-projects a pixel to the pitch plane z = 0. `None` when the viewing
/// ray is parallel to the ground or intersects it behind the camera.
pub fn image_to_pitch(cam: &CameraParams, pixel: Point2<f64>) -> Option<PitchPosition> {
    let dir_cam = Vector3::new(
        (pixel.x - cam.cx) / cam.fx - cam.skew * (pixel.y - cam.cy) / (cam.fx * cam.fy),
        (pixel.y - cam.cy) / cam.fy,
        1.0,
    );
    let dir = cam.rotation.transpose() * dir_cam;
    let center = cam.camera_center();
    if dir.z.abs() < 1e-12 {
        return None;
    }
    let lambda = -center.z / dir.z;
    if lambda <= 0.0 {
        return None;
    }
    Some(PitchPosition {
        x: center.x + lambda * dir.x,
        y: center.y + lambda * dir.y,
    })
}

/// Maps the bottom-center of a (left, top, width, height) bounding box onto
/// the pitch plane.
pub fn athlete_pitch_position(cam: &CameraParams, bbox_ltwh: [f64; 4]) -> Option<PitchPosition> {
    let [l, t, w, h] = bbox_ltwh;
    image_to_pitch(cam, Point2::new(l + w / 2.0, t + h))
}

/// Projects the whole pitch model: catalogue keypoints that land in-frame,
/// and every element sampled at `spacing` meters, clipped to the frame with
/// boundary intersection points inserted. Elements with no visible portion
/// are omitted.
pub fn project_pitch(
    cam: &CameraParams,
    pitch: &PitchModel,
    image: ImageSize,
    spacing: f64,
) -> ProjectedAnnotations {
    let mut out = ProjectedAnnotations::default();
    for kp in pitch.keypoints() {
        if let Some(p) = project_point(cam, &kp.position) {
            if image.contains(p.x, p.y) {
                out.keypoints.insert(kp.id, p);
            }
        }
    }
    let w = image.width as f64;
    let h = image.height as f64;
    for elem in pitch.elements() {
        let pts = clip_element(cam, elem, image, spacing);
        if !pts.is_empty() {
            out.lines.insert(
                elem.name.clone(),
                pts.into_iter()
                    .map(|p| Point2::new(p.x / w, p.y / h))
                    .collect(),
            );
        }
    }
    out
}

fn eval_element(elem: &PitchElement, t: f64) -> Point3<f64> {
    match &elem.geometry {
        ElementGeometry::Segment(s) => s.point_at(t),
        ElementGeometry::Arc(a) => a.point_at(a.start_angle + (a.end_angle - a.start_angle) * t),
    }
}

fn element_arclength(elem: &PitchElement) -> f64 {
    match &elem.geometry {
        ElementGeometry::Segment(s) => s.length(),
        ElementGeometry::Arc(a) => a.radius * (a.end_angle - a.start_angle),
    }
}

// Closed rect [0,W]×[0,H]: boundary points stay representable in the
// normalized [0,1] annotation range.
fn inside_frame(p: &Point2<f64>, image: ImageSize) -> bool {
    p.x >= 0.0 && p.y >= 0.0 && p.x <= image.width as f64 && p.y <= image.height as f64
}

fn visible_at(cam: &CameraParams, elem: &PitchElement, t: f64, image: ImageSize) -> Option<Point2<f64>> {
    project_point(cam, &eval_element(elem, t)).filter(|p| inside_frame(p, image))
}

/// Refines the parameter of a visibility flip between `t_in` (visible) and
/// `t_out` (not visible) by bisection, so emitted boundary points lie on the
/// true projected curve rather than on a sampling chord.
fn refine_crossing(
    cam: &CameraParams,
    elem: &PitchElement,
    mut t_in: f64,
    mut t_out: f64,
    image: ImageSize,
) -> Point2<f64> {
    for _ in 0..60 {
        let mid = 0.5 * (t_in + t_out);
        if visible_at(cam, elem, mid, image).is_some() {
            t_in = mid;
        } else {
            t_out = mid;
        }
    }
    visible_at(cam, elem, t_in, image).expect("bisection kept a visible endpoint")
}

fn clip_element(
    cam: &CameraParams,
    elem: &PitchElement,
    image: ImageSize,
    spacing: f64,
) -> Vec<Point2<f64>> {
    let len = element_arclength(elem);
    let n = (len / spacing).ceil().max(1.0) as usize;
    let params: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let projected: Vec<Option<Point2<f64>>> = params
        .iter()
        .map(|&t| visible_at(cam, elem, t, image))
        .collect();

    let mut out: Vec<Point2<f64>> = Vec::new();
    let push = |p: Point2<f64>, out: &mut Vec<Point2<f64>>| {
        if out
            .last()
            .map_or(true, |q| (p - q).norm_squared() > 1e-18)
        {
            out.push(p);
        }
    };

    for i in 0..n {
        match (&projected[i], &projected[i + 1]) {
            (Some(a), Some(_)) => push(*a, &mut out),
            (Some(a), None) => {
                push(*a, &mut out);
                let exit = refine_crossing(cam, elem, params[i], params[i + 1], image);
                push(exit, &mut out);
            }
            (None, Some(_)) => {
                let enter = refine_crossing(cam, elem, params[i + 1], params[i], image);
                push(enter, &mut out);
            }
            (None, None) => {
                // A chord shorter than the frame can only dip inside near a
                // corner; scan for an interior parameter and emit the short
                // visible stretch if one exists.
                if let Some(t_mid) = (1..8)
                    .map(|k| params[i] + (params[i + 1] - params[i]) * k as f64 / 8.0)
                    .find(|&t| visible_at(cam, elem, t, image).is_some())
                {
                    let enter = refine_crossing(cam, elem, t_mid, params[i], image);
                    let exit = refine_crossing(cam, elem, t_mid, params[i + 1], image);
                    push(enter, &mut out);
                    if let Some(p) = visible_at(cam, elem, t_mid, image) {
                        push(p, &mut out);
                    }
                    push(exit, &mut out);
                }
            }
        }
    }
    if let Some(p) = projected[n] {
        push(p, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::PitchDimensions;
    use nalgebra::Matrix3;

    fn axis_camera() -> CameraParams {
        // Optical axis through the world origin, no principal point offset.
        CameraParams::new(
            1000.0,
            1000.0,
            0.0,
            0.0,
            Matrix3::identity(),
            Vector3::new(0.0, 0.0, 10.0),
        )
    }

    #[test]
    fn optical_axis_projects_to_principal_point() {
        let cam = axis_camera();
        let p = project_point(&cam, &Point3::origin()).unwrap();
        assert!(p.x.abs() < 1e-12 && p.y.abs() < 1e-12);
    }

    #[test]
    fn unit_offset_scales_by_focal_over_depth() {
        let cam = axis_camera();
        let p = project_point(&cam, &Point3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((p.x - 100.0).abs() < 1e-12);
        assert!(p.y.abs() < 1e-12);
    }

    #[test]
    fn behind_camera_is_absent() {
        let cam = axis_camera();
        assert!(project_point(&cam, &Point3::new(0.0, 0.0, -20.0)).is_none());
    }

    fn broadcast_camera() -> CameraParams {
        CameraParams::look_at(
            1800.0,
            ImageSize::new(1920, 1080),
            Point3::new(0.0, -60.0, 15.0),
            Point3::new(0.0, 0.0, 0.0),
        )
    }

    #[test]
    fn ground_roundtrip() {
        let cam = broadcast_camera();
        for (x, y) in [(0.0, 0.0), (10.0, -5.0), (-30.0, 20.0), (45.0, 30.0)] {
            let px = project_point(&cam, &Point3::new(x, y, 0.0)).unwrap();
            let back = image_to_pitch(&cam, px).unwrap();
            assert!((back.x - x).abs() < 1e-8 && (back.y - y).abs() < 1e-8);
        }
    }

    #[test]
    fn horizon_pixel_is_absent() {
        let cam = broadcast_camera();
        // A pixel far above the principal point looks over the horizon.
        assert!(image_to_pitch(&cam, Point2::new(960.0, -40000.0)).is_none());
    }

    #[test]
    fn bbox_bottom_center_maps_to_feet() {
        let cam = broadcast_camera();
        let feet = project_point(&cam, &Point3::new(10.0, -5.0, 0.0)).unwrap();
        let bbox = [feet.x - 20.0, feet.y - 80.0, 40.0, 80.0];
        let pos = athlete_pitch_position(&cam, bbox).unwrap();
        assert!((pos.x - 10.0).abs() < 1e-6 && (pos.y - (-5.0)).abs() < 1e-6);
    }

    #[test]
    fn bbox_above_horizon_is_absent() {
        let cam = broadcast_camera();
        // Bottom-center far above the principal point looks over the horizon.
        assert!(athlete_pitch_position(&cam, [900.0, -50000.0, 40.0, 80.0]).is_none());
    }

    #[test]
    fn bbox_shift_equals_direct_backprojection() {
        let cam = broadcast_camera();
        let bbox = [900.0, 500.0, 40.0, 80.0];
        let shifted = [bbox[0] + 17.0, bbox[1], bbox[2], bbox[3]];
        let via_bbox = athlete_pitch_position(&cam, shifted).unwrap();
        let direct = image_to_pitch(
            &cam,
            Point2::new(shifted[0] + shifted[2] / 2.0, shifted[1] + shifted[3]),
        )
        .unwrap();
        assert_eq!(via_bbox, direct);
    }

    #[test]
    fn sky_camera_projects_nothing() {
        let pitch = PitchModel::build(PitchDimensions::default()).unwrap();
        let cam = CameraParams::look_at(
            1500.0,
            ImageSize::new(1920, 1080),
            Point3::new(0.0, -60.0, 15.0),
            Point3::new(0.0, -60.0, 100.0),
        );
        let ann = project_pitch(&cam, &pitch, ImageSize::new(1920, 1080), 0.5);
        assert!(ann.keypoints.is_empty());
        assert!(ann.lines.is_empty());
    }

    #[test]
    fn projected_line_points_lie_on_projected_elements() {
        let pitch = PitchModel::build(PitchDimensions::default()).unwrap();
        let image = ImageSize::new(1920, 1080);
        let cam = broadcast_camera();
        let ann = project_pitch(&cam, &pitch, image, 0.25);
        assert!(!ann.lines.is_empty());
        for (name, pts) in &ann.lines {
            let elem = pitch.element(name).unwrap();
            for p in pts {
                let px = Point2::new(p.x * image.width as f64, p.y * image.height as f64);
                let d = curve_distance(&cam, elem, &px);
                assert!(d < 1e-6, "{name}: point {px} off projected curve by {d}");
                assert!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0);
            }
        }
    }

    /// Distance from a pixel to the true projected curve: coarse parameter
    /// scan followed by ternary refinement.
    fn curve_distance(cam: &CameraParams, elem: &PitchElement, px: &Point2<f64>) -> f64 {
        let n = 2000;
        let d_at = |t: f64| {
            project_point(cam, &eval_element(elem, t))
                .map_or(f64::INFINITY, |q| (q - px).norm())
        };
        let coarse = (0..=n)
            .map(|i| i as f64 / n as f64)
            .min_by(|&a, &b| d_at(a).partial_cmp(&d_at(b)).unwrap())
            .unwrap();
        let mut lo = (coarse - 1.0 / n as f64).max(0.0);
        let mut hi = (coarse + 1.0 / n as f64).min(1.0);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if d_at(m1) <= d_at(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        d_at(0.5 * (lo + hi))
    }

    #[test]
    fn keypoint_set_matches_independent_visibility_check() {
        // Camera over the left half; the annotation must contain exactly
        // the catalogue keypoints whose projections land in-frame.
        let pitch = PitchModel::build(PitchDimensions::default()).unwrap();
        let image = ImageSize::new(1920, 1080);
        let cam = CameraParams::look_at(
            2200.0,
            image,
            Point3::new(-20.0, -55.0, 14.0),
            Point3::new(-30.0, 0.0, 0.0),
        );
        let ann = project_pitch(&cam, &pitch, image, 0.5);
        let expected: std::collections::BTreeSet<u32> = pitch
            .keypoints()
            .iter()
            .filter(|k| {
                project_point(&cam, &k.position)
                    .is_some_and(|p| image.contains(p.x, p.y))
            })
            .map(|k| k.id)
            .collect();
        let got: std::collections::BTreeSet<u32> = ann.keypoints.keys().copied().collect();
        assert!(!expected.is_empty());
        assert_eq!(got, expected);
    }

    #[test]
    fn scaling_image_and_intrinsics_is_covariant() {
        let pitch = PitchModel::build(PitchDimensions::default()).unwrap();
        let cam = broadcast_camera();
        let mut cam2 = cam.clone();
        cam2.fx *= 2.0;
        cam2.fy *= 2.0;
        cam2.cx *= 2.0;
        cam2.cy *= 2.0;
        let a1 = project_pitch(&cam, &pitch, ImageSize::new(1920, 1080), 0.25);
        let a2 = project_pitch(&cam2, &pitch, ImageSize::new(3840, 2160), 0.25);
        assert_eq!(a1.keypoints.len(), a2.keypoints.len());
        for (id, p) in &a1.keypoints {
            let q = a2.keypoints[id];
            assert!((q.x - 2.0 * p.x).abs() < 1e-9 && (q.y - 2.0 * p.y).abs() < 1e-9);
        }
        for (name, pts) in &a1.lines {
            let qs = &a2.lines[name];
            assert_eq!(pts.len(), qs.len());
            for (p, q) in pts.iter().zip(qs) {
                assert!((p - q).norm() < 1e-9);
            }
        }
    }
}
