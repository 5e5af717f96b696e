//! Online multi-object tracking: appearance + motion association of
//! externally supplied athlete detections into identity-consistent tracks.

pub mod hungarian;
pub mod kalman;
mod tracker;

pub use tracker::{associate, run_sequence, AssociationOutcome, Track, TrackState, Tracker};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Athlete role labels used across detection, tracking, and annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Player,
    Goalkeeper,
    Referee,
    Unknown,
}

/// Axis-aligned box, (left, top, width, height) pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bbox {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl Bbox {
    pub fn from_ltwh(ltwh: [f64; 4]) -> Self {
        Self {
            left: ltwh[0],
            top: ltwh[1],
            width: ltwh[2],
            height: ltwh[3],
        }
    }

    pub fn ltwh(&self) -> [f64; 4] {
        [self.left, self.top, self.width, self.height]
    }

    pub fn area(&self) -> f64 {
        self.width.max(0.0) * self.height.max(0.0)
    }

    pub fn iou(&self, other: &Bbox) -> f64 {
        let x1 = self.left.max(other.left);
        let y1 = self.top.max(other.top);
        let x2 = (self.left + self.width).min(other.left + other.width);
        let y2 = (self.top + self.height).min(other.top + other.height);
        let inter = (x2 - x1).max(0.0) * (y2 - y1).max(0.0);
        let union = self.area() + other.area() - inter;
        if union > 0.0 {
            inter / union
        } else {
            0.0
        }
    }
}

/// One detected athlete in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AthleteDetection {
    pub bbox: Bbox,
    pub role: Role,
    pub jersey: Option<u8>,
    /// Jersey-number legibility in [0, 1].
    pub legibility: f64,
    /// Unit-norm ReID embedding when available.
    pub embedding: Option<DVector<f64>>,
    pub confidence: f64,
}

impl AthleteDetection {
    pub fn new(bbox: Bbox) -> Self {
        Self {
            bbox,
            role: Role::Unknown,
            jersey: None,
            legibility: 0.0,
            embedding: None,
            confidence: 1.0,
        }
    }
}

/// Tracker tunables, set to the customary defaults of this tracker family.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    /// Weight of the appearance term against the motion term in stage 1.
    pub lambda_appearance: f64,
    /// Mahalanobis gate (chi-square 95%, 4 dof).
    pub gating_mahalanobis: f64,
    /// Minimum IoU for the fallback association stage.
    pub iou_gate: f64,
    /// Frames a lost track survives before removal.
    pub max_age: usize,
    /// Consecutive hits before a tentative track confirms.
    pub n_init: usize,
    /// Exponential moving average factor for track appearance.
    pub ema_alpha: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            lambda_appearance: 0.75,
            gating_mahalanobis: kalman::CHI2_95_4DOF,
            iou_gate: 0.1,
            max_age: 30,
            n_init: 3,
            ema_alpha: 0.9,
        }
    }
}
