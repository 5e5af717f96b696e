//! Calibration accuracy: per-element Jaccard counting on reprojection
//! error, completion rate, and the final score FS = CR × JaC₅.

use std::collections::BTreeMap;

use nalgebra::Point2;

use super::MetricsError;
use crate::camera::{CameraParams, ImageSize};
use crate::pitch::{sample_element, PitchModel};
use crate::projection::project_point;

/// Per-frame element counts. An element is a true positive only when every
/// one of its visible sampled points reprojects within the threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JaccardCounts {
    pub tp: usize,
    pub fp: usize,
    pub missed: usize,
}

impl JaccardCounts {
    pub fn add(&mut self, other: &JaccardCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.missed += other.missed;
    }

    /// TP / (TP + FN + FP); vacuously 1.0 when nothing was visible.
    pub fn jaccard(&self) -> f64 {
        let denom = self.tp + self.fp + self.missed;
        if denom == 0 {
            1.0
        } else {
            self.tp as f64 / denom as f64
        }
    }
}

/// Scores a predicted camera against the ground-truth camera by sampling
/// every pitch element at `spacing` meters. Points visible under the ground
/// truth must reproject under the prediction within `gamma_px`; elements
/// visible only under the prediction count as false positives. `pred =
/// None` (no camera produced) turns every visible element into a miss.
pub fn jaccard_frame(
    pred: Option<&CameraParams>,
    gt: &CameraParams,
    pitch: &PitchModel,
    image: ImageSize,
    gamma_px: f64,
    spacing: f64,
) -> JaccardCounts {
    let mut counts = JaccardCounts::default();
    for elem in pitch.elements() {
        let samples = sample_element(elem, spacing);
        let gt_visible: Vec<(usize, Point2<f64>)> = samples
            .iter()
            .enumerate()
            .filter_map(|(i, w)| {
                project_point(gt, w)
                    .filter(|p| image.contains(p.x, p.y))
                    .map(|p| (i, p))
            })
            .collect();
        match pred {
            None => {
                if !gt_visible.is_empty() {
                    counts.missed += 1;
                }
            }
            Some(pred) => {
                if gt_visible.is_empty() {
                    // Only a false positive if the prediction alone sees it.
                    let pred_sees = samples
                        .iter()
                        .any(|w| project_point(pred, w).is_some_and(|p| image.contains(p.x, p.y)));
                    if pred_sees {
                        counts.fp += 1;
                    }
                } else {
                    let all_close = gt_visible.iter().all(|(i, gt_px)| {
                        project_point(pred, &samples[*i])
                            .is_some_and(|p| (p - gt_px).norm() < gamma_px)
                    });
                    if all_close {
                        counts.tp += 1;
                    } else {
                        counts.missed += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Alternate entry point for external benchmark files: scores predicted
/// line polylines against annotated ground-truth polylines, both in pixel
/// coordinates. Every ground-truth point must fall within `gamma_px` of the
/// predicted polyline.
pub fn jaccard_frame_polylines(
    pred_lines: &BTreeMap<String, Vec<Point2<f64>>>,
    gt_lines: &BTreeMap<String, Vec<Point2<f64>>>,
    gamma_px: f64,
) -> JaccardCounts {
    let mut counts = JaccardCounts::default();
    for (name, gt_pts) in gt_lines {
        match pred_lines.get(name) {
            Some(pred_pts) if !pred_pts.is_empty() => {
                let ok = gt_pts
                    .iter()
                    .all(|p| polyline_distance(p, pred_pts) < gamma_px);
                if ok {
                    counts.tp += 1;
                } else {
                    counts.missed += 1;
                }
            }
            _ => counts.missed += 1,
        }
    }
    counts.fp += pred_lines
        .keys()
        .filter(|name| !gt_lines.contains_key(*name))
        .count();
    counts
}

fn polyline_distance(p: &Point2<f64>, poly: &[Point2<f64>]) -> f64 {
    if poly.len() == 1 {
        return (p - poly[0]).norm();
    }
    poly.windows(2)
        .map(|seg| {
            let d = seg[1] - seg[0];
            let len2 = d.norm_squared();
            let t = if len2 > 0.0 {
                ((p - seg[0]).dot(&d) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (p - (seg[0] + d * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Fraction of frames with produced camera parameters.
pub fn completion_rate(valid: usize, total: usize) -> Result<f64, MetricsError> {
    if total == 0 {
        return Err(MetricsError::EmptyDataset);
    }
    Ok(valid as f64 / total as f64)
}

/// Dataset-level calibration report. `jac` and `cr` are fractions in
/// [0, 1]; `fs` follows the percent convention FS = CR × JaC₅ × 100.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationEvalReport {
    /// (gamma in pixels, Jaccard) sorted by gamma.
    pub jac: Vec<(f64, f64)>,
    pub cr: f64,
    pub fs: Option<f64>,
}

impl CalibrationEvalReport {
    pub fn from_counts(
        gamma_counts: &[(f64, JaccardCounts)],
        valid: usize,
        total: usize,
    ) -> Result<Self, MetricsError> {
        let cr = completion_rate(valid, total)?;
        let mut jac: Vec<(f64, f64)> = gamma_counts
            .iter()
            .map(|(g, c)| (*g, c.jaccard()))
            .collect();
        jac.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self::from_rates(jac, cr))
    }

    /// Builds a report from already-aggregated rates.
    pub fn from_rates(jac: Vec<(f64, f64)>, cr: f64) -> Self {
        let fs = jac
            .iter()
            .find(|(g, _)| (*g - 5.0).abs() < 1e-9)
            .map(|(_, j)| cr * j * 100.0);
        Self { jac, cr, fs }
    }
}
