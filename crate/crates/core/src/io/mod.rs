//! Annotation file formats and the ReID embedding sidecar.
//!
//! The frame JSON layout carries athletes, pitch keypoints (pixel
//! coordinates, integer-keyed), pitch lines (normalized point sequences,
//! name-keyed), and camera matrices:
//!
//! ```json
//! {
//!   "athletes": [{"bbox_ltwh": [1116.5, 679.5, 50.8, 98.2], "track_id": 4,
//!                 "jersey_number": "10", "legibility_score": 0.67,
//!                 "role": "player", "team": "right"}],
//!   "keypoints": {"2": {"x": 984.0, "y": 348.0, "p": 0.8}},
//!   "lines": {"Middle line": [{"x": 0.513, "y": 0.322}]},
//!   "K": [[...], [...], [...]],
//!   "Rt": [[...], [...], [...]],
//!   "valid_cam_params": true
//! }
//! ```
//!
//! Canonical serialization is deterministic: known keys in the order shown
//! above, unknown (extension) keys afterwards in lexicographic order,
//! keypoints in numeric id order, floats in shortest round-trip form. A
//! clip file is a JSON object keyed by frame index, written in numeric
//! order.

mod annotation;
mod embeddings;

pub use annotation::{
    parse_clip, parse_frame, parse_pretrain_frame, to_pretrain_subset, validate_frame,
    write_clip, write_frame, write_pretrain_frame, AthleteRecord, CameraMatrices,
    ClipAnnotations, FrameAnnotation, KeypointRecord, PretrainAthleteRecord,
    PretrainFrameAnnotation,
};
pub use embeddings::{
    read_embeddings, read_embeddings_binary, read_embeddings_json, write_embeddings_binary,
    write_embeddings_json, EmbeddingFile, FrameEmbeddings,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed embedding sidecar: {0}")]
    Sidecar(String),
}

impl FormatError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::SchemaViolation {
            path: path.into(),
            message: message.into(),
        }
    }
}
