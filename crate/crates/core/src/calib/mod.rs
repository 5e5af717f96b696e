//! Camera calibration from pitch observations: DLT initialization on the
//! ground plane, closed-form homography decomposition, and point-and-line
//! nonlinear refinement.

mod decompose;
mod dlt;
mod frame;
mod refine;

pub use decompose::{decompose_homography, ground_homography};
pub use dlt::{estimate_homography_dlt, estimate_homography_points_lines, fit_image_line, LineCorrespondence};
pub use frame::calibrate_frame;
pub use refine::{refine_pnl, reprojection_stats, LmConfig, ResidualStats, ValidityConfig};

use std::collections::BTreeMap;

use nalgebra::Point2;
use thiserror::Error;

use crate::camera::CameraParams;

#[derive(Debug, Error, PartialEq)]
pub enum CalibError {
    #[error("need at least {needed} correspondences, got {got}")]
    InsufficientCorrespondences { needed: usize, got: usize },
    #[error("degenerate correspondence configuration (design matrix rank-deficient)")]
    DegenerateConfiguration,
    #[error("focal constraint system is rank-deficient (fronto-parallel view?)")]
    FocalIndeterminate,
    #[error("focal constraints give f^2 <= 0")]
    NoValidFocal,
    #[error("no sign choice places the camera above the ground plane")]
    BehindGround,
}

/// Detected pitch keypoint in pixel coordinates with confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointObservation {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

/// Detected pitch line as an ordered point sequence in normalized [0,1]²
/// image coordinates. Endpoints of a straight detection are recoverable as
/// the sequence extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct LineObservation {
    pub name: String,
    pub points: Vec<Point2<f64>>,
}

/// Outcome of per-frame calibration.
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub params: CameraParams,
    /// RMS over all matched observation distances, pixels.
    pub rms_px: f64,
    /// RMS at the initialization handed to the refiner, pixels.
    pub initial_rms_px: f64,
    /// Per matched keypoint id: reprojection distance, pixels.
    pub keypoint_residuals: BTreeMap<u32, f64>,
    /// Per matched line name: maximum point-to-polyline distance, pixels.
    pub line_residuals: BTreeMap<String, f64>,
    pub valid: bool,
    /// Accepted Levenberg-Marquardt steps.
    pub iterations: usize,
}

/// Tunables for the calibration pipeline. Defaults follow the broadcast
/// main-camera regime.
#[derive(Debug, Clone)]
pub struct CalibrationConfig {
    /// Keypoints below this confidence are dropped before initialization.
    pub confidence_threshold: f64,
    /// World-space sampling step for projected element polylines, meters.
    pub line_spacing: f64,
    /// Cap on observed points per line entering refinement.
    pub max_line_points: usize,
    /// Line correspondences join the DLT only when fewer ground keypoints
    /// than this survive filtering.
    pub min_keypoints_full: usize,
    pub lm: LmConfig,
    pub validity: ValidityConfig,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            confidence_threshold: 0.5,
            line_spacing: 0.25,
            max_line_points: 24,
            min_keypoints_full: 6,
            lm: LmConfig::default(),
            validity: ValidityConfig::default(),
        }
    }
}
