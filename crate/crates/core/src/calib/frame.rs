//! Per-frame calibration pipeline: match observations to the catalogue,
//! confidence-filter, DLT-initialize, decompose, refine, gate on validity.

use nalgebra::Point2;

use super::dlt::{estimate_homography_points_lines, fit_image_line, LineCorrespondence};
use super::{
    decompose_homography, refine_pnl, CalibrationConfig, CalibrationResult, KeypointObservation,
    LineObservation,
};
use crate::camera::ImageSize;
use crate::pitch::{ElementGeometry, PitchModel};

/// Calibrates one frame from keypoint and line observations. `None` marks
/// the frame as a completion-rate failure: fewer than 4 usable
/// correspondences, a degenerate initialization, or a refined camera that
/// misses the validity gate.
pub fn calibrate_frame(
    kps: &[KeypointObservation],
    lines: &[LineObservation],
    pitch: &PitchModel,
    image: ImageSize,
    cfg: &CalibrationConfig,
) -> Option<CalibrationResult> {
    let usable_kps: Vec<KeypointObservation> = kps
        .iter()
        .filter(|o| o.confidence >= cfg.confidence_threshold && pitch.keypoint(o.id).is_some())
        .cloned()
        .collect();
    let usable_lines: Vec<LineObservation> = lines
        .iter()
        .filter(|l| !l.points.is_empty() && pitch.element(&l.name).is_some())
        .cloned()
        .collect();

    // DLT runs on the ground plane: z = 0 keypoints as point pairs, plus
    // straight ground markings as line correspondences when keypoints are
    // scarce.
    let mut pairs: Vec<(Point2<f64>, Point2<f64>)> = Vec::new();
    for obs in &usable_kps {
        let kp = pitch.keypoint(obs.id).expect("filtered above");
        if kp.is_ground() {
            pairs.push((
                Point2::new(kp.position.x, kp.position.y),
                Point2::new(obs.x, obs.y),
            ));
        }
    }

    let mut line_constraints: Vec<LineCorrespondence> = Vec::new();
    if pairs.len() < cfg.min_keypoints_full {
        let (w, h) = (image.width as f64, image.height as f64);
        for l in &usable_lines {
            let elem = pitch.element(&l.name).expect("filtered above");
            let seg = match &elem.geometry {
                ElementGeometry::Segment(s) if s.a.z.abs() < 1e-9 && s.b.z.abs() < 1e-9 => s,
                _ => continue,
            };
            if l.points.len() < 2 {
                continue;
            }
            let px: Vec<Point2<f64>> = l
                .points
                .iter()
                .map(|p| Point2::new(p.x * w, p.y * h))
                .collect();
            if let Some(image_line) = fit_image_line(&px) {
                line_constraints.push(LineCorrespondence {
                    world_a: Point2::new(seg.a.x, seg.a.y),
                    world_b: Point2::new(seg.b.x, seg.b.y),
                    image_line,
                });
            }
        }
    }

    if pairs.len() + line_constraints.len() < 4 {
        return None;
    }
    let h = estimate_homography_points_lines(&pairs, &line_constraints).ok()?;
    let init = decompose_homography(&h, image).ok()?;

    let result = refine_pnl(&init, &usable_kps, &usable_lines, pitch, image, cfg);
    result.valid.then_some(result)
}
