//! Standard multi-object tracking metrics.
//!
//! `hota` follows the standard two-pass procedure: a global alignment
//! score estimated from similarity-weighted potential matches, per-frame
//! Hungarian matching maximizing alignment × similarity, then DetA / AssA
//! accumulation per IoU threshold α. `mota` implements CLEAR matching with
//! persistence of previous matches; `idf1` solves the optimal global
//! identity mapping on per-trajectory overlap counts.

use std::collections::BTreeMap;

use crate::track::hungarian;
use crate::track::Bbox;

/// One identity-labeled box in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedBox {
    pub id: i64,
    pub ltwh: [f64; 4],
}

impl TrackedBox {
    pub fn new(id: i64, ltwh: [f64; 4]) -> Self {
        Self { id, ltwh }
    }

    fn bbox(&self) -> Bbox {
        Bbox::from_ltwh(self.ltwh)
    }
}

pub type FrameBoxes = Vec<TrackedBox>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotaScores {
    pub hota: f64,
    pub det_a: f64,
    pub ass_a: f64,
}

/// The customary α grid 0.05, 0.10, …, 0.95.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// One frame as dense identity indices plus the gt × pred IoU matrix.
type FrameData = (Vec<usize>, Vec<usize>, Vec<Vec<f64>>);

struct SequenceData {
    n_gt: usize,
    n_pred: usize,
    frames: Vec<FrameData>,
    gt_count: Vec<usize>,
    pred_count: Vec<usize>,
}

fn prepare(gt: &[FrameBoxes], pred: &[FrameBoxes]) -> SequenceData {
    assert_eq!(gt.len(), pred.len(), "sequences must align frame by frame");
    let mut gt_ids: BTreeMap<i64, usize> = BTreeMap::new();
    let mut pred_ids: BTreeMap<i64, usize> = BTreeMap::new();
    for frame in gt {
        for b in frame {
            let next = gt_ids.len();
            gt_ids.entry(b.id).or_insert(next);
        }
    }
    for frame in pred {
        for b in frame {
            let next = pred_ids.len();
            pred_ids.entry(b.id).or_insert(next);
        }
    }
    let mut gt_count = vec![0usize; gt_ids.len()];
    let mut pred_count = vec![0usize; pred_ids.len()];
    let mut frames = Vec::with_capacity(gt.len());
    for (g_frame, p_frame) in gt.iter().zip(pred) {
        let g: Vec<usize> = g_frame.iter().map(|b| gt_ids[&b.id]).collect();
        let p: Vec<usize> = p_frame.iter().map(|b| pred_ids[&b.id]).collect();
        for &gi in &g {
            gt_count[gi] += 1;
        }
        for &pi in &p {
            pred_count[pi] += 1;
        }
        let sim: Vec<Vec<f64>> = g_frame
            .iter()
            .map(|gb| p_frame.iter().map(|pb| gb.bbox().iou(&pb.bbox())).collect())
            .collect();
        frames.push((g, p, sim));
    }
    SequenceData {
        n_gt: gt_ids.len(),
        n_pred: pred_ids.len(),
        frames,
        gt_count,
        pred_count,
    }
}

/// Higher-order tracking accuracy averaged over `alphas` (defaults when
/// empty). Returns (HOTA, DetA, AssA) means.
pub fn hota(gt: &[FrameBoxes], pred: &[FrameBoxes], alphas: &[f64]) -> HotaScores {
    let alphas = if alphas.is_empty() {
        default_alpha_grid()
    } else {
        alphas.to_vec()
    };
    let data = prepare(gt, pred);
    let eps = f64::EPSILON;

    // Pass 1: similarity-weighted potential matches between identities.
    let mut potential = vec![vec![0.0f64; data.n_pred]; data.n_gt];
    for (g, p, sim) in &data.frames {
        for (i, &gi) in g.iter().enumerate() {
            let row_sum: f64 = sim[i].iter().sum();
            for (j, &pj) in p.iter().enumerate() {
                let col_sum: f64 = sim.iter().map(|r| r[j]).sum();
                let denom = row_sum + col_sum - sim[i][j];
                if denom > eps {
                    potential[gi][pj] += sim[i][j] / denom;
                }
            }
        }
    }
    let mut global_alignment = vec![vec![0.0f64; data.n_pred]; data.n_gt];
    for gi in 0..data.n_gt {
        for pj in 0..data.n_pred {
            let denom = data.gt_count[gi] as f64 + data.pred_count[pj] as f64 - potential[gi][pj];
            if denom > 0.0 {
                global_alignment[gi][pj] = potential[gi][pj] / denom;
            }
        }
    }

    let mut hota_sum = 0.0;
    let mut det_sum = 0.0;
    let mut ass_sum = 0.0;
    for &alpha in &alphas {
        let mut tp = 0usize;
        let mut fn_count = 0usize;
        let mut fp = 0usize;
        let mut matches_count = vec![vec![0usize; data.n_pred]; data.n_gt];
        for (g, p, sim) in &data.frames {
            if g.is_empty() || p.is_empty() {
                fn_count += g.len();
                fp += p.len();
                continue;
            }
            // Maximize global_alignment * similarity.
            let cost: Vec<Vec<f64>> = (0..g.len())
                .map(|i| {
                    (0..p.len())
                        .map(|j| -(global_alignment[g[i]][p[j]] * sim[i][j]))
                        .collect()
                })
                .collect();
            let (assign, _) = hungarian::solve(&cost);
            let mut matched = 0usize;
            for (i, maybe_j) in assign.iter().enumerate() {
                if let Some(j) = maybe_j {
                    if sim[i][*j] >= alpha - eps {
                        matched += 1;
                        matches_count[g[i]][p[*j]] += 1;
                    }
                }
            }
            tp += matched;
            fn_count += g.len() - matched;
            fp += p.len() - matched;
        }
        let det_a = if tp + fn_count + fp > 0 {
            tp as f64 / (tp + fn_count + fp) as f64
        } else {
            0.0
        };
        let mut ass_total = 0.0;
        for gi in 0..data.n_gt {
            for pj in 0..data.n_pred {
                let m = matches_count[gi][pj];
                if m > 0 {
                    let a = m as f64
                        / (data.gt_count[gi] + data.pred_count[pj] - m) as f64;
                    ass_total += m as f64 * a;
                }
            }
        }
        let ass_a = ass_total / (tp.max(1)) as f64;
        hota_sum += (det_a * ass_a).sqrt();
        det_sum += det_a;
        ass_sum += ass_a;
    }
    let n = alphas.len() as f64;
    HotaScores {
        hota: hota_sum / n,
        det_a: det_sum / n,
        ass_a: ass_sum / n,
    }
}

/// CLEAR MOTA: 1 − (FN + FP + IDSW) / |GT|, with per-frame Hungarian
/// matching on IoU and persistence of previous identity pairings.
pub fn mota(gt: &[FrameBoxes], pred: &[FrameBoxes], iou_threshold: f64) -> f64 {
    let data = prepare(gt, pred);
    let eps = f64::EPSILON;
    let mut prev_match: Vec<Option<usize>> = vec![None; data.n_gt];
    let (mut fn_count, mut fp, mut idsw, mut gt_total) = (0usize, 0usize, 0usize, 0usize);

    for (g, p, sim) in &data.frames {
        gt_total += g.len();
        if g.is_empty() || p.is_empty() {
            fn_count += g.len();
            fp += p.len();
            continue;
        }
        // Previous pairings get a large bonus so they persist whenever the
        // overlap still clears the threshold.
        let cost: Vec<Vec<f64>> = (0..g.len())
            .map(|i| {
                (0..p.len())
                    .map(|j| {
                        if sim[i][j] < iou_threshold - eps {
                            0.0
                        } else {
                            let bonus = if prev_match[g[i]] == Some(p[j]) { 1000.0 } else { 0.0 };
                            -(bonus + sim[i][j])
                        }
                    })
                    .collect()
            })
            .collect();
        let (assign, _) = hungarian::solve(&cost);
        let mut matched = 0usize;
        for (i, maybe_j) in assign.iter().enumerate() {
            if let Some(j) = maybe_j {
                if -cost[i][*j] > eps {
                    matched += 1;
                    if let Some(old) = prev_match[g[i]] {
                        if old != p[*j] {
                            idsw += 1;
                        }
                    }
                    prev_match[g[i]] = Some(p[*j]);
                }
            }
        }
        fn_count += g.len() - matched;
        fp += p.len() - matched;
    }
    1.0 - (fn_count + fp + idsw) as f64 / gt_total.max(1) as f64
}

/// IDF1 via the optimal global identity mapping on per-trajectory overlap
/// counts at the given IoU threshold.
pub fn idf1(gt: &[FrameBoxes], pred: &[FrameBoxes], iou_threshold: f64) -> f64 {
    let data = prepare(gt, pred);
    let eps = f64::EPSILON;
    let gt_total: usize = data.gt_count.iter().sum();
    let pred_total: usize = data.pred_count.iter().sum();
    if gt_total == 0 && pred_total == 0 {
        return 1.0;
    }
    if data.n_gt == 0 || data.n_pred == 0 {
        return 0.0;
    }

    let mut overlap = vec![vec![0usize; data.n_pred]; data.n_gt];
    for (g, p, sim) in &data.frames {
        for (i, &gi) in g.iter().enumerate() {
            for (j, &pj) in p.iter().enumerate() {
                if sim[i][j] >= iou_threshold - eps {
                    overlap[gi][pj] += 1;
                }
            }
        }
    }
    // Maximize total matched frames over an injective identity mapping.
    let cost: Vec<Vec<f64>> = overlap
        .iter()
        .map(|row| row.iter().map(|&c| -(c as f64)).collect())
        .collect();
    let (assign, _) = hungarian::solve(&cost);
    let idtp: usize = assign
        .iter()
        .enumerate()
        .filter_map(|(gi, pj)| pj.map(|pj| overlap[gi][pj]))
        .sum();
    let idfn = gt_total - idtp;
    let idfp = pred_total - idtp;
    2.0 * idtp as f64 / (2 * idtp + idfp + idfn) as f64
}

/// All five MOT metrics with the conventional thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingEvalReport {
    pub hota: f64,
    pub det_a: f64,
    pub ass_a: f64,
    pub mota: f64,
    pub idf1: f64,
}

pub fn evaluate_tracking(gt: &[FrameBoxes], pred: &[FrameBoxes]) -> TrackingEvalReport {
    let h = hota(gt, pred, &[]);
    TrackingEvalReport {
        hota: h.hota,
        det_a: h.det_a,
        ass_a: h.ass_a,
        mota: mota(gt, pred, 0.5),
        idf1: idf1(gt, pred, 0.5),
    }
}
