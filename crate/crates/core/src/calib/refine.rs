//! Point-and-line nonlinear refinement of camera parameters.
//!
//! Minimizes squared pixel residuals with Levenberg-Marquardt over
//! (focal, rotation, translation); the principal point stays at the image
//! center. Point residuals compare observed keypoints against projected
//! catalogue keypoints; line residuals are perpendicular distances from
//! observed line points to the projected element polyline. All residuals
//! are weighted equally.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Point2, Point3, SMatrix, SVector, Vector3};

use super::{CalibrationConfig, CalibrationResult, KeypointObservation, LineObservation};
use crate::camera::{CameraParams, ImageSize};
use crate::pitch::{sample_element, ElementGeometry, PitchModel};
use crate::projection::project_point;

/// Levenberg-Marquardt hyperparameters.
#[derive(Debug, Clone)]
pub struct LmConfig {
    pub initial_damping: f64,
    pub damping_factor: f64,
    pub max_iterations: usize,
    /// Converged when the relative cost decrease of an accepted step falls
    /// below this.
    pub relative_tolerance: f64,
    /// Total squared cost below which the estimate counts as exact and no
    /// further steps are attempted.
    pub cost_floor: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            initial_damping: 1e-3,
            damping_factor: 10.0,
            max_iterations: 100,
            relative_tolerance: 1e-8,
            cost_floor: 1e-16,
        }
    }
}

/// Gate mimicking the annotation pipeline's camera validity flag.
#[derive(Debug, Clone)]
pub struct ValidityConfig {
    /// Maximum RMS reprojection error, pixels, at `reference_width`.
    pub max_rms_px: f64,
    pub reference_width: f64,
    /// Allowed focal range as multiples of the image width.
    pub focal_range: (f64, f64),
    /// Allowed camera height above the pitch, meters.
    pub height_range: (f64, f64),
}

impl Default for ValidityConfig {
    fn default() -> Self {
        Self {
            max_rms_px: 5.0,
            reference_width: 960.0,
            focal_range: (0.2, 10.0),
            height_range: (2.0, 80.0),
        }
    }
}

impl ValidityConfig {
    pub fn check(&self, params: &CameraParams, rms_px: f64, image: ImageSize) -> bool {
        let w = image.width as f64;
        let rms_limit = self.max_rms_px * w / self.reference_width;
        let height = params.camera_center().z;
        params.validate().is_ok()
            && rms_px.is_finite()
            && rms_px <= rms_limit
            && params.fx >= self.focal_range.0 * w
            && params.fx <= self.focal_range.1 * w
            && height >= self.height_range.0
            && height <= self.height_range.1
    }
}

/// Reprojection summary of a parameter set against matched observations.
#[derive(Debug, Clone)]
pub struct ResidualStats {
    pub rms_px: f64,
    pub keypoint_residuals: BTreeMap<u32, f64>,
    pub line_residuals: BTreeMap<String, f64>,
}

const MISS_RESIDUAL: f64 = 1e4;

struct PointTarget {
    id: u32,
    world: Point3<f64>,
    observed: Point2<f64>,
}

struct LineTarget {
    name: String,
    world_samples: Vec<Point3<f64>>,
    observed: Vec<Point2<f64>>,
}

struct Problem {
    points: Vec<PointTarget>,
    lines: Vec<LineTarget>,
    cx: f64,
    cy: f64,
}

impl Problem {
    fn build(
        kps: &[KeypointObservation],
        lines: &[LineObservation],
        pitch: &PitchModel,
        image: ImageSize,
        cfg: &CalibrationConfig,
    ) -> Self {
        let points = kps
            .iter()
            .filter_map(|o| {
                pitch.keypoint(o.id).map(|kp| PointTarget {
                    id: o.id,
                    world: kp.position,
                    observed: Point2::new(o.x, o.y),
                })
            })
            .collect();
        let (w, h) = (image.width as f64, image.height as f64);
        let lines = lines
            .iter()
            .filter_map(|l| {
                let elem = pitch.element(&l.name)?;
                if l.points.is_empty() {
                    return None;
                }
                let observed = subsample(&l.points, cfg.max_line_points)
                    .into_iter()
                    .map(|p| Point2::new(p.x * w, p.y * h))
                    .collect();
                // A straight segment projects onto the segment between its
                // projected endpoints, so the dense polyline collapses to
                // two vertices without changing any distance. Arcs keep the
                // configured sampling.
                let world_samples = match &elem.geometry {
                    ElementGeometry::Segment(s) => vec![s.a, s.b],
                    ElementGeometry::Arc(_) => sample_element(elem, cfg.line_spacing),
                };
                Some(LineTarget {
                    name: l.name.clone(),
                    world_samples,
                    observed,
                })
            })
            .collect();
        let (cx, cy) = image.center();
        Self {
            points,
            lines,
            cx,
            cy,
        }
    }

    fn residual_count(&self) -> usize {
        2 * self.points.len() + self.lines.iter().map(|l| l.observed.len()).sum::<usize>()
    }

    fn distance_count(&self) -> usize {
        self.points.len() + self.lines.iter().map(|l| l.observed.len()).sum::<usize>()
    }

    fn camera(&self, x: &SVector<f64, 7>, base_rot: &Matrix3<f64>) -> CameraParams {
        let omega = Vector3::new(x[1], x[2], x[3]);
        let rot = base_rot * rotation_exp(&omega);
        CameraParams::new(x[0], x[0], self.cx, self.cy, rot, Vector3::new(x[4], x[5], x[6]))
    }

    fn residuals(&self, cam: &CameraParams, out: &mut Vec<f64>) {
        out.clear();
        for t in &self.points {
            match project_point(cam, &t.world) {
                Some(p) => {
                    out.push(p.x - t.observed.x);
                    out.push(p.y - t.observed.y);
                }
                None => {
                    out.push(MISS_RESIDUAL);
                    out.push(MISS_RESIDUAL);
                }
            }
        }
        for l in &self.lines {
            let poly: Vec<Point2<f64>> = l
                .world_samples
                .iter()
                .filter_map(|w| project_point(cam, w))
                .collect();
            for obs in &l.observed {
                out.push(point_polyline_distance(obs, &poly).unwrap_or(MISS_RESIDUAL));
            }
        }
    }
}

/// Keeps the first and last points and an even spread in between.
fn subsample(points: &[Point2<f64>], max: usize) -> Vec<Point2<f64>> {
    if points.len() <= max || max < 2 {
        return points.to_vec();
    }
    (0..max)
        .map(|i| points[i * (points.len() - 1) / (max - 1)])
        .collect()
}

fn point_polyline_distance(p: &Point2<f64>, poly: &[Point2<f64>]) -> Option<f64> {
    if poly.is_empty() {
        return None;
    }
    if poly.len() == 1 {
        return Some((p - poly[0]).norm());
    }
    let mut best = f64::INFINITY;
    for seg in poly.windows(2) {
        let d = seg[1] - seg[0];
        let len2 = d.norm_squared();
        let t = if len2 > 0.0 {
            ((p - seg[0]).dot(&d) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let dist2 = (p - (seg[0] + d * t)).norm_squared();
        if dist2 < best {
            best = dist2;
        }
    }
    Some(best.sqrt())
}

/// Rodrigues' formula.
fn rotation_exp(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    if theta < 1e-12 {
        return Matrix3::identity();
    }
    let k = omega / theta;
    let kx = Matrix3::new(
        0.0, -k.z, k.y, //
        k.z, 0.0, -k.x, //
        -k.y, k.x, 0.0,
    );
    Matrix3::identity() + kx * theta.sin() + kx * kx * (1.0 - theta.cos())
}

/// Computes the reprojection summary of `params` against the matched
/// observation set, using the same residual definitions as the refiner.
pub fn reprojection_stats(
    params: &CameraParams,
    kps: &[KeypointObservation],
    lines: &[LineObservation],
    pitch: &PitchModel,
    image: ImageSize,
    cfg: &CalibrationConfig,
) -> ResidualStats {
    let problem = Problem::build(kps, lines, pitch, image, cfg);
    stats_for(&problem, params)
}

fn stats_for(problem: &Problem, params: &CameraParams) -> ResidualStats {
    let mut keypoint_residuals = BTreeMap::new();
    let mut line_residuals = BTreeMap::new();
    let mut sum_sq = 0.0;
    for t in &problem.points {
        let d = match project_point(params, &t.world) {
            Some(p) => (p - t.observed).norm(),
            None => MISS_RESIDUAL * std::f64::consts::SQRT_2,
        };
        keypoint_residuals.insert(t.id, d);
        sum_sq += d * d;
    }
    for l in &problem.lines {
        let poly: Vec<Point2<f64>> = l
            .world_samples
            .iter()
            .filter_map(|w| project_point(params, w))
            .collect();
        let mut max_d: f64 = 0.0;
        for obs in &l.observed {
            let d = point_polyline_distance(obs, &poly).unwrap_or(MISS_RESIDUAL);
            sum_sq += d * d;
            max_d = max_d.max(d);
        }
        line_residuals.insert(l.name.clone(), max_d);
    }
    let n = problem.distance_count();
    let rms_px = if n > 0 {
        (sum_sq / n as f64).sqrt()
    } else {
        f64::NAN
    };
    ResidualStats {
        rms_px,
        keypoint_residuals,
        line_residuals,
    }
}

/// Levenberg-Marquardt refinement starting from `init`. Accepted steps are
/// strictly cost-decreasing; the best iterate is returned even when the
/// iteration budget runs out.
pub fn refine_pnl(
    init: &CameraParams,
    kps: &[KeypointObservation],
    lines: &[LineObservation],
    pitch: &PitchModel,
    image: ImageSize,
    cfg: &CalibrationConfig,
) -> CalibrationResult {
    let problem = Problem::build(kps, lines, pitch, image, cfg);
    let initial_stats = stats_for(&problem, init);

    let m = problem.residual_count();
    if m < 7 {
        // Under-determined: report the initialization unrefined.
        return CalibrationResult {
            params: init.clone(),
            rms_px: initial_stats.rms_px,
            initial_rms_px: initial_stats.rms_px,
            keypoint_residuals: initial_stats.keypoint_residuals,
            line_residuals: initial_stats.line_residuals,
            valid: false,
            iterations: 0,
        };
    }

    let mut base_rot = init.rotation;
    let mut x = SVector::<f64, 7>::from_column_slice(&[
        init.fx,
        0.0,
        0.0,
        0.0,
        init.translation.x,
        init.translation.y,
        init.translation.z,
    ]);

    let mut r = Vec::with_capacity(m);
    let mut r_trial = Vec::with_capacity(m);
    problem.residuals(&problem.camera(&x, &base_rot), &mut r);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();

    let mut lambda = cfg.lm.initial_damping;
    let mut accepted = 0usize;

    'outer: for _ in 0..cfg.lm.max_iterations {
        if cost <= cfg.lm.cost_floor {
            break;
        }
        // Numeric Jacobian, central differences. Steps: relative for the
        // focal, fixed small angles / meters for rotation and translation.
        let mut jac = vec![0.0f64; m * 7];
        let mut r_plus = Vec::with_capacity(m);
        let mut r_minus = Vec::with_capacity(m);
        for col in 0..7 {
            let h = match col {
                0 => 1e-6 * x[0].abs().max(100.0),
                1..=3 => 1e-7,
                _ => 1e-6,
            };
            let mut xp = x;
            xp[col] += h;
            problem.residuals(&problem.camera(&xp, &base_rot), &mut r_plus);
            let mut xm = x;
            xm[col] -= h;
            problem.residuals(&problem.camera(&xm, &base_rot), &mut r_minus);
            for row in 0..m {
                jac[row * 7 + col] = (r_plus[row] - r_minus[row]) / (2.0 * h);
            }
        }

        // Normal equations J^T J and J^T r.
        let mut jtj = SMatrix::<f64, 7, 7>::zeros();
        let mut jtr = SVector::<f64, 7>::zeros();
        for row in 0..m {
            let jr = &jac[row * 7..row * 7 + 7];
            for i in 0..7 {
                jtr[i] += jr[i] * r[row];
                for j in i..7 {
                    jtj[(i, j)] += jr[i] * jr[j];
                }
            }
        }
        for i in 0..7 {
            for j in 0..i {
                jtj[(i, j)] = jtj[(j, i)];
            }
        }

        loop {
            let mut damped = jtj;
            for i in 0..7 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-jtr)),
                None => {
                    lambda *= cfg.lm.damping_factor;
                    if lambda > 1e14 {
                        break 'outer;
                    }
                    continue;
                }
            };
            let x_trial = x + step;
            problem.residuals(&problem.camera(&x_trial, &base_rot), &mut r_trial);
            let cost_trial: f64 = r_trial.iter().map(|v| v * v).sum();
            if cost_trial < cost {
                debug_assert!(cost_trial <= cost, "accepted LM step must not raise cost");
                let prev_cost = cost;
                // Fold the rotation update into the base and reset omega so
                // the local parameterization stays near the origin.
                let omega = Vector3::new(x_trial[1], x_trial[2], x_trial[3]);
                base_rot *= rotation_exp(&omega);
                x = x_trial;
                x[1] = 0.0;
                x[2] = 0.0;
                x[3] = 0.0;
                std::mem::swap(&mut r, &mut r_trial);
                cost = cost_trial;
                accepted += 1;
                lambda = (lambda / cfg.lm.damping_factor).max(1e-12);
                if prev_cost - cost <= cfg.lm.relative_tolerance * prev_cost {
                    break 'outer;
                }
                break;
            } else {
                lambda *= cfg.lm.damping_factor;
                if lambda > 1e14 {
                    break 'outer;
                }
            }
        }
    }

    let params = problem.camera(&x, &base_rot);
    let final_stats = stats_for(&problem, &params);
    let valid = cfg
        .validity
        .check(&params, final_stats.rms_px, image);
    CalibrationResult {
        params,
        rms_px: final_stats.rms_px,
        initial_rms_px: initial_stats.rms_px,
        keypoint_residuals: final_stats.keypoint_residuals,
        line_residuals: final_stats.line_residuals,
        valid,
        iterations: accepted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::PitchDimensions;
    use nalgebra::Point3;

    fn setup() -> (PitchModel, CameraParams, ImageSize) {
        let pitch = PitchModel::build(PitchDimensions::default()).unwrap();
        let image = ImageSize::new(1920, 1080);
        let cam = CameraParams::look_at(
            1900.0,
            image,
            Point3::new(2.0, -62.0, 16.0),
            Point3::new(0.0, 2.0, 0.0),
        );
        (pitch, cam, image)
    }

    fn observations(
        pitch: &PitchModel,
        cam: &CameraParams,
        image: ImageSize,
    ) -> (Vec<KeypointObservation>, Vec<LineObservation>) {
        let ann = crate::projection::project_pitch(cam, pitch, image, 0.5);
        let kps = ann
            .keypoints
            .iter()
            .map(|(&id, p)| KeypointObservation {
                id,
                x: p.x,
                y: p.y,
                confidence: 1.0,
            })
            .collect();
        // Straight markings only: their projected chords are exact, so a
        // ground-truth camera yields exactly zero line residuals. Circles
        // carry a small sampling floor by construction of the residual.
        let lines = ann
            .lines
            .iter()
            .filter(|(name, _)| !name.starts_with("Circle"))
            .map(|(name, pts)| LineObservation {
                name: name.clone(),
                points: pts.clone(),
            })
            .collect();
        (kps, lines)
    }

    #[test]
    fn already_optimal_stays_put() {
        let (pitch, cam, image) = setup();
        let (kps, lines) = observations(&pitch, &cam, image);
        let res = refine_pnl(&cam, &kps, &lines, &pitch, image, &CalibrationConfig::default());
        assert!(res.rms_px < 1e-6, "rms {}", res.rms_px);
        assert!(res.valid);
    }

    #[test]
    fn recovers_from_perturbed_init() {
        let (pitch, cam, image) = setup();
        let (kps, lines) = observations(&pitch, &cam, image);
        let mut init = cam.clone();
        init.fx *= 1.05;
        init.fy = init.fx;
        let omega = Vector3::new(0.02, -0.02, 0.015); // ~2 degrees total
        init.rotation = cam.rotation * rotation_exp(&omega);
        let res = refine_pnl(&init, &kps, &lines, &pitch, image, &CalibrationConfig::default());
        assert!(res.valid);
        assert!(
            (res.params.fx - cam.fx).abs() / cam.fx < 1e-4,
            "focal off by {}",
            (res.params.fx - cam.fx).abs() / cam.fx
        );
        assert!((res.params.rotation - cam.rotation).norm() < 1e-4);
        assert!((res.params.translation - cam.translation).norm() / cam.translation.norm() < 1e-4);
    }

    #[test]
    fn residual_maps_are_self_consistent() {
        let (pitch, cam, image) = setup();
        let (kps, lines) = observations(&pitch, &cam, image);
        let cfg = CalibrationConfig::default();
        let mut init = cam.clone();
        init.fx *= 1.02;
        init.fy = init.fx;
        let res = refine_pnl(&init, &kps, &lines, &pitch, image, &cfg);
        let again = reprojection_stats(&res.params, &kps, &lines, &pitch, image, &cfg);
        assert!((again.rms_px - res.rms_px).abs() < 1e-9);
        for (id, d) in &res.keypoint_residuals {
            assert!((again.keypoint_residuals[id] - d).abs() < 1e-9);
        }
        for (name, d) in &res.line_residuals {
            assert!((again.line_residuals[name] - d).abs() < 1e-9);
        }
    }
}
