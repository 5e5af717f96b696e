//! Evaluation measures: calibration Jaccard / completion rate / final
//! score, and the MOT suite (HOTA, DetA, AssA, MOTA, IDF1).

pub mod calibration;
pub mod mot;
pub mod report;

pub use calibration::{
    completion_rate, jaccard_frame, jaccard_frame_polylines, CalibrationEvalReport, JaccardCounts,
};
pub use mot::{evaluate_tracking, hota, idf1, mota, FrameBoxes, HotaScores, TrackedBox, TrackingEvalReport};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("empty dataset")]
    EmptyDataset,
}
