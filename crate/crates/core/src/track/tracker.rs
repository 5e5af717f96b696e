//! Track lifecycle and two-stage association.
//!
//! Stage 1 matches appearance-carrying tracks to embedded detections with a
//! blended cosine/Mahalanobis cost; stage 2 falls back to IoU for tentative
//! tracks, appearance-less tracks, and whatever stage 1 left unmatched.

use nalgebra::DVector;

use super::hungarian;
use super::kalman::{measurement_from_ltwh, KalmanState};
use super::{AthleteDetection, Bbox, TrackerConfig};
use crate::post::Tracklet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackState {
    Tentative,
    Confirmed,
    Lost,
    Removed,
}

/// One tracked identity.
#[derive(Debug, Clone)]
pub struct Track {
    pub id: u64,
    pub state: TrackState,
    pub kalman: KalmanState,
    /// Exponentially averaged unit-norm appearance.
    pub appearance: Option<DVector<f64>>,
    pub hits: usize,
    pub time_since_update: usize,
    /// (frame index, detection index) assignments of this identity.
    pub history: Vec<(usize, usize)>,
}

impl Track {
    fn new(id: u64, det: &AthleteDetection, frame: usize, det_idx: usize) -> Self {
        Self {
            id,
            state: TrackState::Tentative,
            kalman: KalmanState::initiate(&measurement_from_ltwh(&det.bbox.ltwh())),
            appearance: det.embedding.clone(),
            hits: 1,
            time_since_update: 0,
            history: vec![(frame, det_idx)],
        }
    }

    /// Advances the motion model one frame and returns the predicted box.
    pub fn predict(&mut self) -> Bbox {
        self.kalman.predict();
        Bbox::from_ltwh(self.kalman.bbox_ltwh())
    }

    fn update(&mut self, det: &AthleteDetection, frame: usize, det_idx: usize, cfg: &TrackerConfig) {
        self.kalman.update(&measurement_from_ltwh(&det.bbox.ltwh()));
        if let Some(e) = &det.embedding {
            self.appearance = Some(match &self.appearance {
                Some(a) => {
                    let mixed = a * cfg.ema_alpha + e * (1.0 - cfg.ema_alpha);
                    let n = mixed.norm();
                    if n > 0.0 {
                        mixed / n
                    } else {
                        e.clone()
                    }
                }
                None => e.clone(),
            });
        }
        self.hits += 1;
        self.time_since_update = 0;
        self.history.push((frame, det_idx));
        let graduates = self.state == TrackState::Tentative && self.hits >= cfg.n_init;
        if graduates || self.state == TrackState::Lost {
            self.state = TrackState::Confirmed;
        }
    }

    fn mark_missed(&mut self, cfg: &TrackerConfig) {
        self.time_since_update += 1;
        match self.state {
            // A tentative track dies on its first miss: confirmation
            // requires consecutive hits.
            TrackState::Tentative => self.state = TrackState::Removed,
            TrackState::Confirmed => self.state = TrackState::Lost,
            TrackState::Lost => {
                if self.time_since_update > cfg.max_age {
                    self.state = TrackState::Removed;
                }
            }
            TrackState::Removed => {}
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssociationOutcome {
    /// (track index, detection index) pairs.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_tracks: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
}

fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let denom = a.norm() * b.norm();
    if denom > 0.0 {
        a.dot(b) / denom
    } else {
        0.0
    }
}

/// Two-stage association against predicted track states. Tracks must have
/// been predicted for the current frame already.
pub fn associate(
    tracks: &[Track],
    detections: &[AthleteDetection],
    cfg: &TrackerConfig,
) -> AssociationOutcome {
    let mut outcome = AssociationOutcome::default();
    let mut track_matched = vec![false; tracks.len()];
    let mut det_matched = vec![false; detections.len()];

    // Stage 1: appearance + motion for tracks that carry an appearance and
    // have graduated past tentative.
    let stage1_tracks: Vec<usize> = (0..tracks.len())
        .filter(|&i| {
            matches!(tracks[i].state, TrackState::Confirmed | TrackState::Lost)
                && tracks[i].appearance.is_some()
        })
        .collect();
    let stage1_dets: Vec<usize> = (0..detections.len())
        .filter(|&j| detections[j].embedding.is_some())
        .collect();
    if !stage1_tracks.is_empty() && !stage1_dets.is_empty() {
        let cost: Vec<Vec<f64>> = stage1_tracks
            .iter()
            .map(|&ti| {
                let track = &tracks[ti];
                let appearance = track.appearance.as_ref().expect("filtered");
                stage1_dets
                    .iter()
                    .map(|&dj| {
                        let det = &detections[dj];
                        let m = measurement_from_ltwh(&det.bbox.ltwh());
                        let maha = track.kalman.gating_distance(&m);
                        if maha > cfg.gating_mahalanobis {
                            return f64::INFINITY;
                        }
                        let appearance_cost =
                            1.0 - cosine(appearance, det.embedding.as_ref().expect("filtered"));
                        cfg.lambda_appearance * appearance_cost
                            + (1.0 - cfg.lambda_appearance) * (maha / cfg.gating_mahalanobis)
                    })
                    .collect()
            })
            .collect();
        for (r, c) in hungarian::solve_gated_lex(&cost) {
            let (ti, dj) = (stage1_tracks[r], stage1_dets[c]);
            track_matched[ti] = true;
            det_matched[dj] = true;
            outcome.matches.push((ti, dj));
        }
    }

    // Stage 2: IoU for everything still unmatched.
    let stage2_tracks: Vec<usize> = (0..tracks.len()).filter(|&i| !track_matched[i]).collect();
    let stage2_dets: Vec<usize> = (0..detections.len()).filter(|&j| !det_matched[j]).collect();
    if !stage2_tracks.is_empty() && !stage2_dets.is_empty() {
        let cost: Vec<Vec<f64>> = stage2_tracks
            .iter()
            .map(|&ti| {
                let predicted = Bbox::from_ltwh(tracks[ti].kalman.bbox_ltwh());
                stage2_dets
                    .iter()
                    .map(|&dj| {
                        let iou = predicted.iou(&detections[dj].bbox);
                        if iou >= cfg.iou_gate {
                            1.0 - iou
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        for (r, c) in hungarian::solve_gated_lex(&cost) {
            let (ti, dj) = (stage2_tracks[r], stage2_dets[c]);
            track_matched[ti] = true;
            det_matched[dj] = true;
            outcome.matches.push((ti, dj));
        }
    }

    outcome.matches.sort_unstable();
    outcome.unmatched_tracks = (0..tracks.len()).filter(|&i| !track_matched[i]).collect();
    outcome.unmatched_detections = (0..detections.len()).filter(|&j| !det_matched[j]).collect();
    outcome
}

/// Sequence-local tracker state, advanced strictly frame by frame.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
    frame_index: usize,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Self {
        Self {
            config,
            tracks: Vec::new(),
            next_id: 1,
            frame_index: 0,
        }
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Processes one frame of detections. Every detection either matches an
    /// existing track or spawns a tentative one; the returned pairs cover
    /// all input detections.
    pub fn step(&mut self, detections: &[AthleteDetection]) -> Vec<(usize, u64)> {
        let frame = self.frame_index;
        self.frame_index += 1;

        for track in &mut self.tracks {
            track.predict();
        }

        let outcome = associate(&self.tracks, detections, &self.config);

        let mut assignments: Vec<(usize, u64)> = Vec::with_capacity(detections.len());
        for (ti, dj) in &outcome.matches {
            self.tracks[*ti].update(&detections[*dj], frame, *dj, &self.config);
            assignments.push((*dj, self.tracks[*ti].id));
        }
        for ti in &outcome.unmatched_tracks {
            self.tracks[*ti].mark_missed(&self.config);
        }
        for dj in &outcome.unmatched_detections {
            let id = self.next_id;
            self.next_id += 1;
            self.tracks.push(Track::new(id, &detections[*dj], frame, *dj));
            assignments.push((*dj, id));
        }
        self.tracks.retain(|t| t.state != TrackState::Removed);

        assignments.sort_unstable();
        assignments
    }
}

/// Runs the tracker over a whole sequence and groups the per-frame
/// assignments into tracklets. Deterministic given inputs and config.
pub fn run_sequence(frames: &[Vec<AthleteDetection>], config: TrackerConfig) -> Vec<Tracklet> {
    let mut tracker = Tracker::new(config);
    let mut by_id: std::collections::BTreeMap<u64, Vec<(usize, AthleteDetection)>> =
        std::collections::BTreeMap::new();
    for (frame, detections) in frames.iter().enumerate() {
        for (det_idx, track_id) in tracker.step(detections) {
            by_id
                .entry(track_id)
                .or_default()
                .push((frame, detections[det_idx].clone()));
        }
    }
    by_id
        .into_iter()
        .map(|(track_id, entries)| Tracklet::from_entries(track_id, entries))
        .collect()
}
