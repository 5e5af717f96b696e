//! Shared test oracles, implemented independently of the library code paths
//! they check.

use std::collections::BTreeMap;

use gsr_core::metrics::FrameBoxes;
use rand::Rng;

/// Plain IoU, written from the definition.
fn iou(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let ax2 = a[0] + a[2];
    let ay2 = a[1] + a[3];
    let bx2 = b[0] + b[2];
    let by2 = b[1] + b[3];
    let ix = (ax2.min(bx2) - a[0].max(b[0])).max(0.0);
    let iy = (ay2.min(by2) - a[1].max(b[1])).max(0.0);
    let inter = ix * iy;
    let union = a[2] * a[3] + b[2] * b[3] - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Enumerates all injective assignments of the smaller side, maximizing the
/// given score matrix; returns the argmax pair set.
fn best_assignment(score: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let nr = score.len();
    let nc = score.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Vec::new();
    }
    fn rec(
        score: &[Vec<f64>],
        row: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, usize)>,
        total: f64,
        best: &mut (f64, Vec<(usize, usize)>),
    ) {
        if row == score.len() {
            if total > best.0 {
                *best = (total, current.clone());
            }
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                current.push((row, c));
                rec(score, row + 1, used, current, total + score[row][c], best);
                current.pop();
                used[c] = false;
            }
        }
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    if nr <= nc {
        rec(score, 0, &mut vec![false; nc], &mut Vec::new(), 0.0, &mut best);
        best.1
    } else {
        let t: Vec<Vec<f64>> = (0..nc)
            .map(|j| (0..nr).map(|i| score[i][j]).collect())
            .collect();
        rec(&t, 0, &mut vec![false; nr], &mut Vec::new(), 0.0, &mut best);
        best.1.into_iter().map(|(c, r)| (r, c)).collect()
    }
}

/// Second, independent implementation of the HOTA procedure:
/// global alignment from similarity-weighted potential matches,
/// per-frame matching by exhaustive enumeration, DetA / AssA / HOTA
/// averaged over the alpha grid.
pub fn hota_bruteforce(gt: &[FrameBoxes], pred: &[FrameBoxes], alphas: &[f64]) -> (f64, f64, f64) {
    assert_eq!(gt.len(), pred.len());
    let eps = f64::EPSILON;

    let mut gt_count: BTreeMap<i64, f64> = BTreeMap::new();
    let mut pred_count: BTreeMap<i64, f64> = BTreeMap::new();
    let mut potential: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for (g_frame, p_frame) in gt.iter().zip(pred) {
        for g in g_frame {
            *gt_count.entry(g.id).or_default() += 1.0;
        }
        for p in p_frame {
            *pred_count.entry(p.id).or_default() += 1.0;
        }
        for g in g_frame {
            let row_sum: f64 = p_frame.iter().map(|p| iou(&g.ltwh, &p.ltwh)).sum();
            for p in p_frame {
                let s = iou(&g.ltwh, &p.ltwh);
                let col_sum: f64 = g_frame.iter().map(|g2| iou(&g2.ltwh, &p.ltwh)).sum();
                let denom = row_sum + col_sum - s;
                if denom > eps {
                    *potential.entry((g.id, p.id)).or_default() += s / denom;
                }
            }
        }
    }
    let galign = |g: i64, p: i64| -> f64 {
        let pot = potential.get(&(g, p)).copied().unwrap_or(0.0);
        let denom = gt_count[&g] + pred_count[&p] - pot;
        if denom > 0.0 {
            pot / denom
        } else {
            0.0
        }
    };

    let (mut hota_sum, mut det_sum, mut ass_sum) = (0.0, 0.0, 0.0);
    for &alpha in alphas {
        let mut tp = 0.0f64;
        let mut fn_count = 0.0f64;
        let mut fp = 0.0f64;
        let mut matches: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for (g_frame, p_frame) in gt.iter().zip(pred) {
            let score: Vec<Vec<f64>> = g_frame
                .iter()
                .map(|g| {
                    p_frame
                        .iter()
                        .map(|p| galign(g.id, p.id) * iou(&g.ltwh, &p.ltwh))
                        .collect()
                })
                .collect();
            let pairs = best_assignment(&score);
            let mut matched = 0.0;
            for (i, j) in pairs {
                if iou(&g_frame[i].ltwh, &p_frame[j].ltwh) >= alpha - eps {
                    matched += 1.0;
                    *matches.entry((g_frame[i].id, p_frame[j].id)).or_default() += 1.0;
                }
            }
            tp += matched;
            fn_count += g_frame.len() as f64 - matched;
            fp += p_frame.len() as f64 - matched;
        }
        let det_a = if tp + fn_count + fp > 0.0 {
            tp / (tp + fn_count + fp)
        } else {
            0.0
        };
        let mut ass_total = 0.0;
        for (&(g, p), &m) in &matches {
            let a = m / (gt_count[&g] + pred_count[&p] - m);
            ass_total += m * a;
        }
        let ass_a = ass_total / tp.max(1.0);
        det_sum += det_a;
        ass_sum += ass_a;
        hota_sum += (det_a * ass_a).sqrt();
    }
    let n = alphas.len() as f64;
    (hota_sum / n, det_sum / n, ass_sum / n)
}

/// Random short tracking sequences: a handful of wandering ground-truth
/// tracks and a prediction corrupted by jitter, identity splits, drops, and
/// clutter.
pub fn random_tracking_sequence(
    rng: &mut impl Rng,
    max_tracks: usize,
    frames: usize,
) -> (Vec<FrameBoxes>, Vec<FrameBoxes>) {
    use gsr_core::metrics::TrackedBox;

    let n_tracks = rng.random_range(1..=max_tracks);
    struct Gt {
        id: i64,
        birth: usize,
        death: usize,
        x: f64,
        y: f64,
        vx: f64,
        vy: f64,
        split_at: Option<usize>,
    }
    let mut tracks: Vec<Gt> = (0..n_tracks)
        .map(|k| {
            let birth = rng.random_range(0..frames / 2);
            let death = rng.random_range(birth + 1..=frames);
            Gt {
                id: k as i64 + 1,
                birth,
                death,
                x: rng.random_range(0.0..800.0),
                y: rng.random_range(0.0..500.0),
                vx: rng.random_range(-6.0..6.0),
                vy: rng.random_range(-6.0..6.0),
                split_at: if rng.random_bool(0.4) {
                    Some(rng.random_range(birth..death + 1))
                } else {
                    None
                },
            }
        })
        .collect();

    let mut gt = Vec::with_capacity(frames);
    let mut pred = Vec::with_capacity(frames);
    for f in 0..frames {
        let mut g_frame = Vec::new();
        let mut p_frame = Vec::new();
        for t in tracks.iter_mut() {
            if f < t.birth || f >= t.death {
                continue;
            }
            t.x += t.vx;
            t.y += t.vy;
            let ltwh = [t.x, t.y, 30.0 + t.id as f64, 60.0];
            g_frame.push(TrackedBox::new(t.id, ltwh));
            if rng.random_bool(0.85) {
                let jitter: f64 = rng.random_range(0.0..6.0);
                let pid = match t.split_at {
                    Some(s) if f >= s => 100 + t.id,
                    _ => t.id,
                } + 1000;
                p_frame.push(TrackedBox::new(
                    pid,
                    [
                        ltwh[0] + rng.random_range(-jitter..=jitter.max(1e-9)),
                        ltwh[1] + rng.random_range(-jitter..=jitter.max(1e-9)),
                        ltwh[2],
                        ltwh[3],
                    ],
                ));
            }
        }
        if rng.random_bool(0.15) {
            p_frame.push(TrackedBox::new(
                9000 + f as i64,
                [
                    rng.random_range(0.0..900.0),
                    rng.random_range(0.0..500.0),
                    35.0,
                    65.0,
                ],
            ));
        }
        gt.push(g_frame);
        pred.push(p_frame);
    }
    (gt, pred)
}
