//! Tracklet post-processing: legibility filtering, attribute majority
//! voting, fragment merging, and team-affiliation clustering.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::CameraParams;
use crate::projection::athlete_pitch_position;
use crate::track::{AthleteDetection, Role};

#[derive(Debug, Error, PartialEq)]
pub enum PostError {
    #[error("insufficient data for team clustering: {0}")]
    InsufficientData(String),
}

/// Team side, named by the sign of the mean pitch x coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Left,
    Right,
}

/// An identity-linked sequence of detections.
#[derive(Debug, Clone)]
pub struct Tracklet {
    pub track_id: u64,
    /// Strictly increasing frame indices.
    pub entries: Vec<(usize, AthleteDetection)>,
    pub voted_role: Role,
    pub voted_jersey: Option<u8>,
    /// Unit-norm average of the entry embeddings, when any exist.
    pub mean_embedding: Option<DVector<f64>>,
    pub team: Option<Team>,
}

impl Tracklet {
    pub fn from_entries(track_id: u64, mut entries: Vec<(usize, AthleteDetection)>) -> Self {
        entries.sort_by_key(|(f, _)| *f);
        let (voted_role, voted_jersey) = vote_over(&entries);
        let mean_embedding = mean_embedding(&entries);
        Self {
            track_id,
            entries,
            voted_role,
            voted_jersey,
            mean_embedding,
            team: None,
        }
    }

    pub fn first_frame(&self) -> usize {
        self.entries.first().map(|(f, _)| *f).unwrap_or(0)
    }

    pub fn last_frame(&self) -> usize {
        self.entries.last().map(|(f, _)| *f).unwrap_or(0)
    }

    /// Mean ground position over frames with a calibrated camera.
    pub fn mean_pitch_position(
        &self,
        calibrations: &BTreeMap<usize, CameraParams>,
    ) -> Option<(f64, f64)> {
        let mut sum = (0.0, 0.0);
        let mut n = 0usize;
        for (frame, det) in &self.entries {
            let Some(cam) = calibrations.get(frame) else {
                continue;
            };
            if let Some(p) = athlete_pitch_position(cam, det.bbox.ltwh()) {
                sum.0 += p.x;
                sum.1 += p.y;
                n += 1;
            }
        }
        (n > 0).then(|| (sum.0 / n as f64, sum.1 / n as f64))
    }

    fn median_pitch_x(&self, calibrations: &BTreeMap<usize, CameraParams>) -> Option<f64> {
        let mut xs: Vec<f64> = self
            .entries
            .iter()
            .filter_map(|(frame, det)| {
                calibrations
                    .get(frame)
                    .and_then(|cam| athlete_pitch_position(cam, det.bbox.ltwh()))
                    .map(|p| p.x)
            })
            .collect();
        if xs.is_empty() {
            return None;
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = xs.len() / 2;
        Some(if xs.len() % 2 == 1 {
            xs[mid]
        } else {
            0.5 * (xs[mid - 1] + xs[mid])
        })
    }
}

fn mean_embedding(entries: &[(usize, AthleteDetection)]) -> Option<DVector<f64>> {
    let mut acc: Option<DVector<f64>> = None;
    let mut n = 0usize;
    for (_, det) in entries {
        if let Some(e) = &det.embedding {
            match &mut acc {
                Some(a) if a.len() == e.len() => *a += e,
                Some(_) => continue,
                None => acc = Some(e.clone()),
            }
            n += 1;
        }
    }
    let acc = acc?;
    let mean = acc / n as f64;
    let norm = mean.norm();
    (norm > 0.0).then(|| mean / norm)
}

/// Nulls jersey numbers whose legibility score falls below `threshold`;
/// everything else is left untouched.
pub fn filter_legibility(dets: &[AthleteDetection], threshold: f64) -> Vec<AthleteDetection> {
    dets.iter()
        .map(|d| {
            let mut d = d.clone();
            if d.legibility < threshold {
                d.jersey = None;
            }
            d
        })
        .collect()
}

/// Majority vote over a tracklet's role labels and non-null jersey numbers.
/// Ties break toward the higher summed detection confidence, then the
/// smaller value / enum order.
pub fn vote_attributes(tracklet: &Tracklet) -> (Role, Option<u8>) {
    vote_over(&tracklet.entries)
}

fn vote_over(entries: &[(usize, AthleteDetection)]) -> (Role, Option<u8>) {
    let mut role_votes: BTreeMap<Role, (usize, f64)> = BTreeMap::new();
    let mut jersey_votes: BTreeMap<u8, (usize, f64)> = BTreeMap::new();
    for (_, det) in entries {
        let rv = role_votes.entry(det.role).or_insert((0, 0.0));
        rv.0 += 1;
        rv.1 += det.confidence;
        if let Some(j) = det.jersey {
            let jv = jersey_votes.entry(j).or_insert((0, 0.0));
            jv.0 += 1;
            jv.1 += det.confidence;
        }
    }
    let role = pick_vote(&role_votes).unwrap_or(Role::Unknown);
    let jersey = pick_vote(&jersey_votes);
    (role, jersey)
}

// BTreeMap iteration is ascending, so keeping strict improvements picks the
// smallest key among ties.
fn pick_vote<K: Copy + Ord>(votes: &BTreeMap<K, (usize, f64)>) -> Option<K> {
    let mut best: Option<(usize, f64)> = None;
    let mut key = None;
    for (k, &(count, conf)) in votes {
        let better = match best {
            None => true,
            Some((bc, bconf)) => count > bc || (count == bc && conf > bconf),
        };
        if better {
            best = Some((count, conf));
            key = Some(*k);
        }
    }
    key
}

/// Controls for greedy fragment merging.
#[derive(Debug, Clone)]
pub struct MergeConfig {
    /// Minimum cosine between mean embeddings.
    pub cosine_min: f64,
    /// Maximum frame gap between fragments.
    pub max_gap: usize,
    /// Refuse merges whose voted jerseys disagree (a null on either side is
    /// compatible with anything).
    pub require_jersey_consistency: bool,
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            cosine_min: 0.7,
            max_gap: 150,
            require_jersey_consistency: true,
        }
    }
}

fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let d = a.norm() * b.norm();
    if d > 0.0 && a.len() == b.len() {
        a.dot(b) / d
    } else {
        -1.0
    }
}

fn mergeable(a: &Tracklet, b: &Tracklet, cfg: &MergeConfig) -> Option<f64> {
    // Temporal disjointness is a hard constraint.
    let (first, second) = if a.last_frame() < b.first_frame() {
        (a, b)
    } else if b.last_frame() < a.first_frame() {
        (b, a)
    } else {
        return None;
    };
    let gap = second.first_frame() - first.last_frame();
    if gap > cfg.max_gap {
        return None;
    }
    let (ea, eb) = (a.mean_embedding.as_ref()?, b.mean_embedding.as_ref()?);
    let cos = cosine(ea, eb);
    if cos < cfg.cosine_min {
        return None;
    }
    if cfg.require_jersey_consistency {
        if let (Some(ja), Some(jb)) = (a.voted_jersey, b.voted_jersey) {
            if ja != jb {
                return None;
            }
        }
    }
    Some(cos)
}

/// Greedy agglomeration of tracklet fragments, most-similar pair first.
/// The merged tracklet keeps the earlier fragment's id, re-votes its
/// attributes, and re-averages its embedding.
pub fn merge_tracklets(tracklets: Vec<Tracklet>, cfg: &MergeConfig) -> Vec<Tracklet> {
    let mut pool = tracklets;
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                if let Some(cos) = mergeable(&pool[i], &pool[j], cfg) {
                    let better = match best {
                        None => true,
                        // Strict improvement keeps the smallest (i, j) among
                        // equal-cosine candidates.
                        Some((bc, _, _)) => cos > bc,
                    };
                    if better {
                        best = Some((cos, i, j));
                    }
                }
            }
        }
        let Some((_, i, j)) = best else {
            return pool;
        };
        let b = pool.remove(j);
        let a = pool.remove(i);
        let id = if a.first_frame() <= b.first_frame() {
            a.track_id
        } else {
            b.track_id
        };
        let mut entries = a.entries;
        entries.extend(b.entries);
        pool.push(Tracklet::from_entries(id, entries));
    }
}

/// Team clustering configuration.
#[derive(Debug, Clone)]
pub struct TeamConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    /// Weight of the standardized pitch coordinates against the embedding.
    pub pitch_weight: f64,
}

impl Default for TeamConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            restarts: 50,
            max_iters: 100,
            pitch_weight: 1.0,
        }
    }
}

/// Clusters player tracklets into two squads on (mean embedding ⊕
/// standardized mean pitch position) and names them by mean pitch x.
/// Referees are never assigned; goalkeepers follow the cluster on their
/// median side of the pitch.
pub fn assign_teams(
    tracklets: &mut [Tracklet],
    calibrations: &BTreeMap<usize, CameraParams>,
    cfg: &TeamConfig,
) -> Result<(), PostError> {
    let mut players: Vec<usize> = Vec::new();
    let mut positions: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for (i, t) in tracklets.iter().enumerate() {
        if t.voted_role != Role::Player {
            continue;
        }
        let Some(emb) = &t.mean_embedding else {
            continue;
        };
        let Some(pos) = t.mean_pitch_position(calibrations) else {
            continue;
        };
        if players
            .first()
            .is_some_and(|&p| tracklets[p].mean_embedding.as_ref().unwrap().len() != emb.len())
        {
            continue;
        }
        positions.insert(i, pos);
        players.push(i);
    }
    if players.len() < 2 {
        return Err(PostError::InsufficientData(format!(
            "need at least 2 player tracklets with embeddings and pitch positions, got {}",
            players.len()
        )));
    }

    // Standardize pitch coordinates over the clustered population.
    let n = players.len() as f64;
    let mean_x = players.iter().map(|i| positions[i].0).sum::<f64>() / n;
    let mean_y = players.iter().map(|i| positions[i].1).sum::<f64>() / n;
    let var_x = players.iter().map(|i| (positions[i].0 - mean_x).powi(2)).sum::<f64>() / n;
    let var_y = players.iter().map(|i| (positions[i].1 - mean_y).powi(2)).sum::<f64>() / n;
    let sx = if var_x > 0.0 { var_x.sqrt() } else { 1.0 };
    let sy = if var_y > 0.0 { var_y.sqrt() } else { 1.0 };

    let features: Vec<DVector<f64>> = players
        .iter()
        .map(|i| {
            let emb = tracklets[*i].mean_embedding.as_ref().unwrap();
            let (px, py) = positions[i];
            let mut f = DVector::zeros(emb.len() + 2);
            f.rows_mut(0, emb.len()).copy_from(emb);
            f[emb.len()] = (px - mean_x) / sx * cfg.pitch_weight;
            f[emb.len() + 1] = (py - mean_y) / sy * cfg.pitch_weight;
            f
        })
        .collect();

    let labels = kmeans_two(&features, cfg);

    // Name clusters by mean pitch x: smaller mean is the left squad.
    let mut mean_cluster_x = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for (slot, &i) in players.iter().enumerate() {
        mean_cluster_x[labels[slot]] += positions[&i].0;
        counts[labels[slot]] += 1;
    }
    for c in 0..2 {
        if counts[c] > 0 {
            mean_cluster_x[c] /= counts[c] as f64;
        }
    }
    let team_of = |cluster: usize| -> Team {
        if mean_cluster_x[cluster] <= mean_cluster_x[1 - cluster] {
            Team::Left
        } else {
            Team::Right
        }
    };
    for (slot, &i) in players.iter().enumerate() {
        tracklets[i].team = Some(team_of(labels[slot]));
    }

    // Goalkeepers side with the cluster on their own half.
    let left_mean = mean_cluster_x[if team_of(0) == Team::Left { 0 } else { 1 }];
    let right_mean = mean_cluster_x[if team_of(0) == Team::Left { 1 } else { 0 }];
    for t in tracklets.iter_mut() {
        match t.voted_role {
            Role::Referee => t.team = None,
            Role::Goalkeeper => {
                if let Some(med) = t.median_pitch_x(calibrations) {
                    let same_sign_left = med.signum() == left_mean.signum();
                    let same_sign_right = med.signum() == right_mean.signum();
                    t.team = Some(match (same_sign_left, same_sign_right) {
                        (true, false) => Team::Left,
                        (false, true) => Team::Right,
                        // Both or neither cluster on that side: nearest mean.
                        _ => {
                            if (med - left_mean).abs() <= (med - right_mean).abs() {
                                Team::Left
                            } else {
                                Team::Right
                            }
                        }
                    });
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Two-means with k-means++ seeding, fixed seed, best inertia over restarts.
fn kmeans_two(features: &[DVector<f64>], cfg: &TeamConfig) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = features.len();
    let mut best_labels = vec![0usize; n];
    let mut best_inertia = f64::INFINITY;

    for _ in 0..cfg.restarts.max(1) {
        // k-means++ seeding.
        let first = rng.random_range(0..n);
        let d2: Vec<f64> = features
            .iter()
            .map(|f| (f - &features[first]).norm_squared())
            .collect();
        let total: f64 = d2.iter().sum();
        let second = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            (first + 1) % n
        };
        let mut centers = [features[first].clone(), features[second].clone()];
        let mut labels = vec![0usize; n];

        for _ in 0..cfg.max_iters {
            let mut changed = false;
            for (i, f) in features.iter().enumerate() {
                let d0 = (f - &centers[0]).norm_squared();
                let d1 = (f - &centers[1]).norm_squared();
                let l = if d1 < d0 { 1 } else { 0 };
                if labels[i] != l {
                    labels[i] = l;
                    changed = true;
                }
            }
            for c in 0..2 {
                let members: Vec<&DVector<f64>> = features
                    .iter()
                    .zip(&labels)
                    .filter(|(_, &l)| l == c)
                    .map(|(f, _)| f)
                    .collect();
                if !members.is_empty() {
                    let mut mean = DVector::zeros(features[0].len());
                    for m in &members {
                        mean += *m;
                    }
                    centers[c] = mean / members.len() as f64;
                }
            }
            if !changed {
                break;
            }
        }
        let inertia: f64 = features
            .iter()
            .zip(&labels)
            .map(|(f, &l)| (f - &centers[l]).norm_squared())
            .sum();
        if inertia < best_inertia {
            best_inertia = inertia;
            best_labels = labels;
        }
    }
    best_labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{CameraParams, ImageSize};
    use crate::projection::project_point;
    use crate::track::Bbox;
    use nalgebra::Point3;

    fn det(jersey: Option<u8>, legibility: f64, conf: f64, role: Role) -> AthleteDetection {
        AthleteDetection {
            bbox: Bbox::from_ltwh([0.0, 0.0, 10.0, 20.0]),
            role,
            jersey,
            legibility,
            embedding: None,
            confidence: conf,
        }
    }

    #[test]
    fn legibility_threshold_gates_jerseys() {
        let dets = vec![
            det(Some(10), 0.67, 1.0, Role::Player),
            det(Some(10), 0.49, 1.0, Role::Player),
        ];
        let out = filter_legibility(&dets, 0.5);
        assert_eq!(out[0].jersey, Some(10));
        assert_eq!(out[1].jersey, None);
        let strict = filter_legibility(&dets, 1.0);
        assert!(strict.iter().all(|d| d.jersey.is_none()));
        let exact = filter_legibility(&[det(Some(4), 1.0, 1.0, Role::Player)], 1.0);
        assert_eq!(exact[0].jersey, Some(4));
    }

    #[test]
    fn jersey_vote_majority_and_null_handling() {
        let entries: Vec<(usize, AthleteDetection)> = [Some(10), Some(10), None, Some(7)]
            .iter()
            .enumerate()
            .map(|(f, &j)| (f, det(j, 1.0, 1.0, Role::Player)))
            .collect();
        let t = Tracklet::from_entries(1, entries);
        assert_eq!(t.voted_jersey, Some(10));
        assert_eq!(t.voted_role, Role::Player);
    }

    #[test]
    fn role_vote_majority() {
        let mut entries: Vec<(usize, AthleteDetection)> = (0..5)
            .map(|f| (f, det(None, 1.0, 1.0, Role::Player)))
            .collect();
        entries.push((5, det(None, 1.0, 1.0, Role::Goalkeeper)));
        let t = Tracklet::from_entries(1, entries);
        assert_eq!(t.voted_role, Role::Player);
    }

    #[test]
    fn jersey_tie_breaks_on_confidence() {
        let entries = vec![
            (0, det(Some(4), 1.0, 0.9, Role::Player)),
            (1, det(Some(7), 1.0, 0.5, Role::Player)),
        ];
        let t = Tracklet::from_entries(1, entries);
        assert_eq!(t.voted_jersey, Some(4));
        // Same confidence: smaller number wins.
        let entries = vec![
            (0, det(Some(9), 1.0, 0.5, Role::Player)),
            (1, det(Some(3), 1.0, 0.5, Role::Player)),
        ];
        let t = Tracklet::from_entries(1, entries);
        assert_eq!(t.voted_jersey, Some(3));
    }

    #[test]
    fn vote_is_permutation_invariant() {
        let mut entries = vec![
            (0, det(Some(5), 1.0, 0.8, Role::Player)),
            (1, det(Some(5), 1.0, 0.6, Role::Player)),
            (2, det(Some(8), 1.0, 0.9, Role::Goalkeeper)),
            (3, det(None, 1.0, 0.9, Role::Player)),
        ];
        let t1 = Tracklet::from_entries(1, entries.clone());
        entries.reverse();
        let t2 = Tracklet::from_entries(1, entries);
        assert_eq!(t1.voted_jersey, t2.voted_jersey);
        assert_eq!(t1.voted_role, t2.voted_role);
    }

    fn embedded_tracklet(
        id: u64,
        frames: std::ops::Range<usize>,
        emb: &[f64],
        jersey: Option<u8>,
    ) -> Tracklet {
        let v = DVector::from_column_slice(emb);
        let v = &v / v.norm();
        let entries: Vec<(usize, AthleteDetection)> = frames
            .map(|f| {
                let mut d = det(jersey, 1.0, 1.0, Role::Player);
                d.embedding = Some(v.clone());
                (f, d)
            })
            .collect();
        Tracklet::from_entries(id, entries)
    }

    #[test]
    fn merges_same_identity_fragments() {
        let a = embedded_tracklet(1, 0..50, &[1.0, 0.05, 0.0], Some(10));
        let b = embedded_tracklet(2, 60..100, &[1.0, 0.0, 0.05], None);
        let merged = merge_tracklets(vec![a, b], &MergeConfig::default());
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].track_id, 1);
        assert_eq!(merged[0].voted_jersey, Some(10));
        assert_eq!(merged[0].entries.len(), 90);
    }

    #[test]
    fn never_merges_temporal_overlap() {
        let a = embedded_tracklet(1, 0..50, &[1.0, 0.0, 0.0], Some(10));
        let b = embedded_tracklet(2, 49..80, &[1.0, 0.0, 0.0], Some(10));
        let merged = merge_tracklets(vec![a, b], &MergeConfig::default());
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn never_merges_conflicting_jerseys() {
        let a = embedded_tracklet(1, 0..50, &[1.0, 0.0, 0.0], Some(10));
        let b = embedded_tracklet(2, 60..80, &[1.0, 0.0, 0.0], Some(7));
        let merged = merge_tracklets(vec![a, b], &MergeConfig::default());
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn gap_and_cosine_gates_hold() {
        let a = embedded_tracklet(1, 0..10, &[1.0, 0.0, 0.0], None);
        let far = embedded_tracklet(2, 200..210, &[1.0, 0.0, 0.0], None);
        let cfg = MergeConfig {
            max_gap: 100,
            ..Default::default()
        };
        assert_eq!(merge_tracklets(vec![a.clone(), far], &cfg).len(), 2);
        let different = embedded_tracklet(3, 20..30, &[0.0, 1.0, 0.0], None);
        assert_eq!(merge_tracklets(vec![a, different], &cfg).len(), 2);
    }

    fn overhead_camera() -> CameraParams {
        CameraParams::look_at(
            1000.0,
            ImageSize::new(1920, 1080),
            Point3::new(0.0, -40.0, 30.0),
            Point3::new(0.0, 0.0, 0.0),
        )
    }

    fn positioned_tracklet(id: u64, role: Role, x: f64, y: f64, emb: &[f64]) -> Tracklet {
        let cam = overhead_camera();
        let feet = project_point(&cam, &Point3::new(x, y, 0.0)).unwrap();
        let v = DVector::from_column_slice(emb);
        let v = &v / v.norm();
        let entries: Vec<(usize, AthleteDetection)> = (0..5)
            .map(|f| {
                let mut d = det(None, 1.0, 1.0, role);
                d.bbox = Bbox::from_ltwh([feet.x - 10.0, feet.y - 40.0, 20.0, 40.0]);
                d.embedding = Some(v.clone());
                (f, d)
            })
            .collect();
        Tracklet::from_entries(id, entries)
    }

    fn calibrations() -> BTreeMap<usize, CameraParams> {
        (0..5).map(|f| (f, overhead_camera())).collect()
    }

    #[test]
    fn planted_squads_recovered_exactly() {
        let mut tracklets = Vec::new();
        for i in 0..6 {
            let y = -20.0 + 8.0 * i as f64;
            tracklets.push(positioned_tracklet(
                i as u64 + 1,
                Role::Player,
                -15.0,
                y,
                &[1.0, 0.02 * i as f64, 0.0],
            ));
            tracklets.push(positioned_tracklet(
                100 + i as u64,
                Role::Player,
                15.0,
                y,
                &[0.0, 0.02 * i as f64, 1.0],
            ));
        }
        tracklets.push(positioned_tracklet(200, Role::Referee, 0.0, 0.0, &[0.5, 0.5, 0.5]));
        tracklets.push(positioned_tracklet(201, Role::Goalkeeper, -45.0, 0.0, &[1.0, 0.1, 0.0]));
        assign_teams(&mut tracklets, &calibrations(), &TeamConfig::default()).unwrap();
        for t in &tracklets {
            match t.voted_role {
                Role::Player => {
                    let expect = if t.track_id < 100 { Team::Left } else { Team::Right };
                    assert_eq!(t.team, Some(expect), "tracklet {}", t.track_id);
                }
                Role::Referee => assert_eq!(t.team, None),
                Role::Goalkeeper => assert_eq!(t.team, Some(Team::Left)),
                Role::Unknown => {}
            }
        }
    }

    #[test]
    fn single_player_is_insufficient() {
        let mut tracklets = vec![positioned_tracklet(1, Role::Player, 0.0, 0.0, &[1.0, 0.0])];
        let err = assign_teams(&mut tracklets, &calibrations(), &TeamConfig::default());
        assert!(matches!(err, Err(PostError::InsufficientData(_))));
    }

    #[test]
    fn team_assignment_is_deterministic() {
        let build = || {
            let mut ts = Vec::new();
            for i in 0..4 {
                ts.push(positioned_tracklet(i, Role::Player, -10.0, i as f64, &[1.0, 0.0]));
                ts.push(positioned_tracklet(10 + i, Role::Player, 10.0, i as f64, &[0.0, 1.0]));
            }
            assign_teams(&mut ts, &calibrations(), &TeamConfig::default()).unwrap();
            ts.iter().map(|t| t.team).collect::<Vec<_>>()
        };
        assert_eq!(build(), build());
    }
}
