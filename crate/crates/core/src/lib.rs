//! Game-state reconstruction for broadcast soccer.
//!
//! The crate turns per-frame pitch observations (keypoints, line points) and
//! athlete detections into calibrated pinhole cameras, pitch-coordinate
//! trajectories, refined tracklets, and standardized evaluation scores.
//!
//! Main building blocks:
//! - [`pitch`]: canonical 3D pitch markings and the derived keypoint catalogue
//! - [`camera`] / [`projection`]: pinhole model, forward projection, ground-plane back-projection
//! - [`calib`]: DLT initialization, homography decomposition, point-and-line refinement
//! - [`track`]: appearance + motion multi-object tracker
//! - [`post`]: tracklet voting, merging, and team clustering
//! - [`metrics`]: calibration Jaccard/CR/FS and the MOT suite (HOTA, MOTA, IDF1)
//! - [`synth`]: deterministic synthetic broadcast scenes used as test oracles
//! - [`io`]: annotation JSON formats and the ReID embedding sidecar

pub mod calib;
pub mod camera;
pub mod io;
pub mod metrics;
pub mod pitch;
pub mod post;
pub mod projection;
pub mod synth;
pub mod track;

pub use camera::{CameraParams, ImageSize};
pub use pitch::{PitchDimensions, PitchModel};
