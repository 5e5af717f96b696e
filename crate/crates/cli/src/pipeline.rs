//! Batch stages over directories of per-clip annotation files.
//!
//! A clip is `<name>.json` (frame-index-keyed annotations); its optional
//! ReID sidecar sits beside it as `<name>.emb.bin` or `<name>.emb.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gsr_core::calib::{calibrate_frame, CalibrationConfig};
use gsr_core::camera::{CameraParams, ImageSize};
use gsr_core::io::{
    self, parse_clip, read_embeddings, write_clip, AthleteRecord, ClipAnnotations,
    EmbeddingFile, FrameAnnotation, FrameEmbeddings, KeypointRecord,
};
use gsr_core::metrics::{
    self, CalibrationEvalReport, FrameBoxes, JaccardCounts, TrackedBox, TrackingEvalReport,
};
use gsr_core::pitch::PitchModel;
use gsr_core::post::{
    assign_teams, filter_legibility, merge_tracklets, MergeConfig, PostError, TeamConfig, Tracklet,
};
use gsr_core::projection::project_pitch;
use gsr_core::synth::{
    render_observations, simulate_match, CameraMode, NoiseModel, SynthConfig,
};
use gsr_core::track::{AthleteDetection, Tracker, TrackerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

/// Sorted `<name>.json` clip files of a directory, sidecars excluded.
pub fn discover_clips(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut clips: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(".json") && !n.ends_with(".emb.json"))
        })
        .collect();
    clips.sort();
    if clips.is_empty() {
        bail!("no clip files (*.json) found in {}", dir.display());
    }
    Ok(clips)
}

fn sidecar_for(clip: &Path) -> Option<PathBuf> {
    let stem = clip.file_stem()?.to_str()?;
    for ext in ["emb.bin", "emb.json"] {
        let candidate = clip.with_file_name(format!("{stem}.{ext}"));
        if candidate.exists() {
            return Some(candidate);
        }
    }
    None
}

fn load_clip(path: &Path) -> Result<ClipAnnotations> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_clip(&text).with_context(|| format!("parsing {}", path.display()))
}

fn store_clip(path: &Path, clip: &ClipAnnotations) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, write_clip(clip)).with_context(|| format!("writing {}", path.display()))
}

fn write_summary(path: Option<&Path>, summary: &serde_json::Value) -> Result<()> {
    if let Some(path) = path {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(summary)?)?;
    }
    Ok(())
}

/// Image size recorded by synth and assumed by calibrate/annotate when a
/// frame does not carry one.
const DEFAULT_IMAGE: ImageSize = ImageSize {
    width: 1920,
    height: 1080,
};

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub struct SynthArgs {
    pub output: PathBuf,
    pub clips: usize,
    pub frames: usize,
    pub athletes: usize,
    pub seed: u64,
    pub full_pitch_camera: bool,
    pub noise: NoiseModel,
}

pub fn cmd_synth(args: &SynthArgs, pitch: &PitchModel, summary_path: Option<&Path>) -> Result<()> {
    let started = Instant::now();
    let cfg = SynthConfig {
        n_athletes: args.athletes,
        camera: if args.full_pitch_camera {
            CameraMode::FullPitch
        } else {
            CameraMode::SampledMain
        },
        ..Default::default()
    };
    let gt_dir = args.output.join("gt");
    let obs_dir = args.output.join("obs");
    std::fs::create_dir_all(&gt_dir)?;
    std::fs::create_dir_all(&obs_dir)?;

    for clip_idx in 0..args.clips {
        let name = format!("clip_{clip_idx:03}");
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(clip_idx as u64));
        let scene = simulate_match(&mut rng, &cfg, pitch, args.frames);
        let frames = render_observations(&scene, pitch, &args.noise, &cfg, &mut rng);

        let mut gt_clip = ClipAnnotations::new();
        let mut obs_clip = ClipAnnotations::new();
        let mut embeddings: EmbeddingFile = Vec::with_capacity(frames.len());
        for (f, frame) in frames.iter().enumerate() {
            gt_clip.insert(f as u64, frame.ground_truth.clone());

            let athletes: Vec<AthleteRecord> = frame
                .detections
                .iter()
                .map(|d| AthleteRecord::from_detection(d, None))
                .collect();
            let keypoints: BTreeMap<u32, KeypointRecord> = frame
                .keypoints
                .iter()
                .map(|o| {
                    (
                        o.id,
                        KeypointRecord {
                            x: o.x,
                            y: o.y,
                            p: o.confidence,
                        },
                    )
                })
                .collect();
            let lines = frame
                .lines
                .iter()
                .map(|l| (l.name.clone(), l.points.clone()))
                .collect();
            obs_clip.insert(
                f as u64,
                FrameAnnotation {
                    athletes,
                    keypoints,
                    lines,
                    camera: None,
                    valid_cam_params: false,
                    extra: Default::default(),
                },
            );
            embeddings.push(
                frame
                    .detections
                    .iter()
                    .map(|d| d.embedding.clone().unwrap_or_default())
                    .collect(),
            );
        }
        store_clip(&gt_dir.join(format!("{name}.json")), &gt_clip)?;
        store_clip(&obs_dir.join(format!("{name}.json")), &obs_clip)?;
        io::write_embeddings_binary(&obs_dir.join(format!("{name}.emb.bin")), &embeddings)?;
        eprintln!("[synth] {name}: {} frames", frames.len());
    }
    eprintln!(
        "[synth] wrote {} clips to {} in {:.1}s",
        args.clips,
        args.output.display(),
        started.elapsed().as_secs_f64()
    );
    write_summary(
        summary_path,
        &json!({
            "command": "synth",
            "clips": args.clips,
            "frames_per_clip": args.frames,
            "athletes": args.athletes,
            "seed": args.seed,
        }),
    )
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

pub fn cmd_calibrate(
    input: &Path,
    output: &Path,
    pitch: &PitchModel,
    summary_path: Option<&Path>,
) -> Result<()> {
    let started = Instant::now();
    let cfg = CalibrationConfig::default();
    let clips = discover_clips(input)?;
    let results: Vec<Result<(usize, usize)>> = clips
        .par_iter()
        .map(|path| -> Result<(usize, usize)> {
            let clip_started = Instant::now();
            let mut clip = load_clip(path)?;
            let mut valid = 0usize;
            let total = clip.len();
            for frame in clip.values_mut() {
                let kps = frame.keypoint_observations();
                let lines = frame.line_observations();
                match calibrate_frame(&kps, &lines, pitch, DEFAULT_IMAGE, &cfg) {
                    Some(result) => {
                        frame.set_camera(Some(&result.params), true);
                        valid += 1;
                    }
                    None => frame.set_camera(None, false),
                }
            }
            let out_path = output.join(path.file_name().unwrap());
            store_clip(&out_path, &clip)?;
            eprintln!(
                "[calibrate] {}: {valid}/{total} frames valid ({:.2}s)",
                path.file_name().unwrap().to_string_lossy(),
                clip_started.elapsed().as_secs_f64()
            );
            Ok((valid, total))
        })
        .collect();

    let mut valid = 0usize;
    let mut total = 0usize;
    for r in results {
        let (v, t) = r?;
        valid += v;
        total += t;
    }
    let cr = metrics::completion_rate(valid, total)?;
    eprintln!(
        "[calibrate] CR = {:.3} ({valid}/{total} frames) in {:.1}s",
        cr,
        started.elapsed().as_secs_f64()
    );
    write_summary(
        summary_path,
        &json!({
            "command": "calibrate",
            "clips": clips.len(),
            "frames": total,
            "valid_frames": valid,
            "cr": cr,
        }),
    )
}

// ---------------------------------------------------------------------------
// annotate
// ---------------------------------------------------------------------------

/// Replaces detected keypoints/lines with projections of the canonical
/// pitch for every frame that carries a valid camera.
pub fn cmd_annotate(
    input: &Path,
    output: &Path,
    pitch: &PitchModel,
    spacing: f64,
    summary_path: Option<&Path>,
) -> Result<()> {
    let clips = discover_clips(input)?;
    let results: Vec<Result<usize>> = clips
        .par_iter()
        .map(|path| -> Result<usize> {
            let mut clip = load_clip(path)?;
            let mut replaced = 0usize;
            for frame in clip.values_mut() {
                if !frame.valid_cam_params {
                    continue;
                }
                let Some(cam) = frame.camera_params() else {
                    continue;
                };
                let projected = project_pitch(&cam, pitch, DEFAULT_IMAGE, spacing);
                frame.keypoints = projected
                    .keypoints
                    .iter()
                    .map(|(&id, p)| (id, KeypointRecord { x: p.x, y: p.y, p: 1.0 }))
                    .collect();
                frame.lines = projected.lines;
                replaced += 1;
            }
            store_clip(&output.join(path.file_name().unwrap()), &clip)?;
            eprintln!(
                "[annotate] {}: {replaced} frames reprojected",
                path.file_name().unwrap().to_string_lossy()
            );
            Ok(replaced)
        })
        .collect();
    let replaced: usize = results.into_iter().sum::<Result<usize>>()?;
    write_summary(
        summary_path,
        &json!({
            "command": "annotate",
            "clips": clips.len(),
            "frames_reprojected": replaced,
        }),
    )
}

// ---------------------------------------------------------------------------
// track
// ---------------------------------------------------------------------------

fn detections_for_frame(
    frame: &FrameAnnotation,
    embeddings: Option<&FrameEmbeddings>,
) -> Vec<AthleteDetection> {
    frame
        .athletes
        .iter()
        .enumerate()
        .map(|(i, record)| {
            let embedding = embeddings
                .and_then(|frame_embs| frame_embs.get(i))
                .filter(|e| !e.is_empty())
                .cloned();
            record.to_detection(embedding)
        })
        .collect()
}

pub fn cmd_track(
    input: &Path,
    output: &Path,
    tracker_cfg: &TrackerConfig,
    summary_path: Option<&Path>,
) -> Result<()> {
    let clips = discover_clips(input)?;
    let results: Vec<Result<usize>> = clips
        .par_iter()
        .map(|path| -> Result<usize> {
            let mut clip = load_clip(path)?;
            let sidecar = sidecar_for(path);
            let embeddings = match &sidecar {
                Some(p) => Some(read_embeddings(p)?),
                None => None,
            };
            let mut tracker = Tracker::new(tracker_cfg.clone());
            let mut track_count = 0u64;
            for (pos, frame) in clip.values_mut().enumerate() {
                let dets = detections_for_frame(frame, embeddings.as_ref().and_then(|e| e.get(pos)));
                let assignments = tracker.step(&dets);
                for (det_idx, track_id) in assignments {
                    frame.athletes[det_idx].track_id = Some(track_id as i64);
                    track_count = track_count.max(track_id);
                }
            }
            store_clip(&output.join(path.file_name().unwrap()), &clip)?;
            if let Some(p) = sidecar {
                std::fs::copy(&p, output.join(p.file_name().unwrap()))?;
            }
            eprintln!(
                "[track] {}: {} identities",
                path.file_name().unwrap().to_string_lossy(),
                track_count
            );
            Ok(track_count as usize)
        })
        .collect();
    let identities: usize = results.into_iter().sum::<Result<usize>>()?;
    write_summary(
        summary_path,
        &json!({
            "command": "track",
            "clips": clips.len(),
            "identities": identities,
        }),
    )
}

// ---------------------------------------------------------------------------
// postprocess
// ---------------------------------------------------------------------------

pub struct PostprocessArgs {
    pub input: PathBuf,
    pub calibrations: Option<PathBuf>,
    pub output: PathBuf,
    pub legibility_threshold: f64,
    pub merge: MergeConfig,
    pub team: TeamConfig,
}

/// Legibility filtering, tracklet voting, fragment merging, and team
/// clustering. Output frames list refined athletes sorted by track id,
/// untracked records passing through unchanged behind them.
pub fn cmd_postprocess(args: &PostprocessArgs, summary_path: Option<&Path>) -> Result<()> {
    let clips = discover_clips(&args.input)?;
    let results: Vec<Result<usize>> = clips
        .par_iter()
        .map(|path| -> Result<usize> {
            let clip = load_clip(path)?;
            let embeddings = match sidecar_for(path) {
                Some(p) => Some(read_embeddings(&p)?),
                None => None,
            };
            let calibrations: BTreeMap<usize, CameraParams> = match &args.calibrations {
                Some(dir) => {
                    let cal_path = dir.join(path.file_name().unwrap());
                    if cal_path.exists() {
                        load_clip(&cal_path)?
                            .iter()
                            .filter(|(_, f)| f.valid_cam_params)
                            .filter_map(|(&idx, f)| f.camera_params().map(|c| (idx as usize, c)))
                            .collect()
                    } else {
                        BTreeMap::new()
                    }
                }
                None => clip
                    .iter()
                    .filter(|(_, f)| f.valid_cam_params)
                    .filter_map(|(&idx, f)| f.camera_params().map(|c| (idx as usize, c)))
                    .collect(),
            };

            // Group tracked detections into tracklets; untracked records
            // pass through untouched.
            let mut groups: BTreeMap<u64, Vec<(usize, AthleteDetection)>> = BTreeMap::new();
            let mut passthrough: BTreeMap<u64, Vec<AthleteRecord>> = BTreeMap::new();
            for (pos, (&frame_idx, frame)) in clip.iter().enumerate() {
                let dets = filter_legibility(
                    &detections_for_frame(frame, embeddings.as_ref().and_then(|e| e.get(pos))),
                    args.legibility_threshold,
                );
                for (record, det) in frame.athletes.iter().zip(dets) {
                    match record.track_id {
                        Some(id) if id >= 0 => {
                            groups
                                .entry(id as u64)
                                .or_default()
                                .push((frame_idx as usize, det));
                        }
                        _ => passthrough.entry(frame_idx).or_default().push(record.clone()),
                    }
                }
            }
            let tracklets: Vec<Tracklet> = groups
                .into_iter()
                .map(|(id, entries)| Tracklet::from_entries(id, entries))
                .collect();
            let mut tracklets = merge_tracklets(tracklets, &args.merge);
            match assign_teams(&mut tracklets, &calibrations, &args.team) {
                Ok(()) => {}
                Err(PostError::InsufficientData(why)) => {
                    eprintln!(
                        "[postprocess] {}: teams skipped ({why})",
                        path.file_name().unwrap().to_string_lossy()
                    );
                }
            }

            // Rebuild frames from the refined tracklets.
            let mut out_clip = ClipAnnotations::new();
            for (&frame_idx, frame) in &clip {
                let mut rebuilt = frame.clone();
                rebuilt.athletes = Vec::new();
                out_clip.insert(frame_idx, rebuilt);
            }
            for t in &tracklets {
                for (frame_idx, det) in &t.entries {
                    let Some(frame) = out_clip.get_mut(&(*frame_idx as u64)) else {
                        continue;
                    };
                    frame.athletes.push(AthleteRecord {
                        bbox_ltwh: det.bbox.ltwh(),
                        track_id: Some(t.track_id as i64),
                        jersey_number: t.voted_jersey,
                        legibility_score: Some(det.legibility),
                        role: Some(t.voted_role),
                        team: t.team,
                        extra: Default::default(),
                    });
                }
            }
            for frame in out_clip.values_mut() {
                frame.athletes.sort_by_key(|a| a.track_id);
            }
            for (frame_idx, records) in passthrough {
                if let Some(frame) = out_clip.get_mut(&frame_idx) {
                    frame.athletes.extend(records);
                }
            }
            store_clip(&args.output.join(path.file_name().unwrap()), &out_clip)?;
            eprintln!(
                "[postprocess] {}: {} tracklets after merge",
                path.file_name().unwrap().to_string_lossy(),
                tracklets.len()
            );
            Ok(tracklets.len())
        })
        .collect();
    let tracklets: usize = results.into_iter().sum::<Result<usize>>()?;
    write_summary(
        summary_path,
        &json!({
            "command": "postprocess",
            "clips": clips.len(),
            "tracklets": tracklets,
        }),
    )
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub enum EvalOutput {
    Json,
    Table,
}

pub fn cmd_eval_calibration(
    pred_dir: &Path,
    gt_dir: &Path,
    pitch: &PitchModel,
    gammas: &[f64],
    format: &EvalOutput,
    output: Option<&Path>,
) -> Result<()> {
    let gt_clips = discover_clips(gt_dir)?;
    let per_clip: Vec<Result<(Vec<JaccardCounts>, usize, usize)>> = gt_clips
        .par_iter()
        .map(|gt_path| -> Result<(Vec<JaccardCounts>, usize, usize)> {
            let name = gt_path.file_name().unwrap();
            let gt_clip = load_clip(gt_path)?;
            let pred_path = pred_dir.join(name);
            if !pred_path.exists() {
                bail!("prediction clip missing: {}", pred_path.display());
            }
            let pred_clip = load_clip(&pred_path)?;
            let mut counts = vec![JaccardCounts::default(); gammas.len()];
            let mut valid = 0usize;
            let mut total = 0usize;
            for (idx, gt_frame) in &gt_clip {
                if !gt_frame.valid_cam_params {
                    continue;
                }
                let Some(gt_cam) = gt_frame.camera_params() else {
                    continue;
                };
                total += 1;
                let pred_cam = pred_clip
                    .get(idx)
                    .filter(|f| f.valid_cam_params)
                    .and_then(|f| f.camera_params());
                if pred_cam.is_some() {
                    valid += 1;
                }
                for (slot, gamma) in gammas.iter().enumerate() {
                    counts[slot].add(&metrics::jaccard_frame(
                        pred_cam.as_ref(),
                        &gt_cam,
                        pitch,
                        DEFAULT_IMAGE,
                        *gamma,
                        0.25,
                    ));
                }
            }
            Ok((counts, valid, total))
        })
        .collect();

    let mut counts = vec![JaccardCounts::default(); gammas.len()];
    let mut valid = 0usize;
    let mut total = 0usize;
    for r in per_clip {
        let (c, v, t) = r?;
        for (acc, add) in counts.iter_mut().zip(&c) {
            acc.add(add);
        }
        valid += v;
        total += t;
    }
    let gamma_counts: Vec<(f64, JaccardCounts)> =
        gammas.iter().copied().zip(counts).collect();
    let report = CalibrationEvalReport::from_counts(&gamma_counts, valid, total)?;
    emit_report(
        &metrics::report::calibration_json(&report),
        &metrics::report::calibration_table(&report),
        format,
        output,
    )
}

fn tracked_boxes(frame: &FrameAnnotation, id_offset: i64, which: &str) -> Result<FrameBoxes> {
    frame
        .athletes
        .iter()
        .map(|a| {
            let id = a.track_id.with_context(|| {
                format!("{which} annotation has an athlete without track_id")
            })?;
            Ok(TrackedBox::new(id + id_offset, a.bbox_ltwh))
        })
        .collect()
}

pub fn cmd_eval_tracking(
    pred_dir: &Path,
    gt_dir: &Path,
    format: &EvalOutput,
    output: Option<&Path>,
) -> Result<()> {
    let gt_clips = discover_clips(gt_dir)?;
    let mut gt_frames: Vec<FrameBoxes> = Vec::new();
    let mut pred_frames: Vec<FrameBoxes> = Vec::new();
    // Clips concatenate into one sequence with namespaced identities, which
    // pools the per-clip counts exactly.
    for (clip_idx, gt_path) in gt_clips.iter().enumerate() {
        let name = gt_path.file_name().unwrap();
        let gt_clip = load_clip(gt_path)?;
        let pred_path = pred_dir.join(name);
        if !pred_path.exists() {
            bail!("prediction clip missing: {}", pred_path.display());
        }
        let pred_clip = load_clip(&pred_path)?;
        let offset = clip_idx as i64 * 1_000_000;
        for (idx, gt_frame) in &gt_clip {
            gt_frames.push(tracked_boxes(gt_frame, offset, "ground-truth")?);
            pred_frames.push(match pred_clip.get(idx) {
                Some(f) => tracked_boxes(f, offset, "prediction")?,
                None => Vec::new(),
            });
        }
    }
    let report: TrackingEvalReport = metrics::evaluate_tracking(&gt_frames, &pred_frames);
    emit_report(
        &metrics::report::tracking_json(&report),
        &metrics::report::tracking_table(&report),
        format,
        output,
    )
}

fn emit_report(
    json_value: &serde_json::Value,
    table: &str,
    format: &EvalOutput,
    output: Option<&Path>,
) -> Result<()> {
    let rendered = match format {
        EvalOutput::Json => serde_json::to_string_pretty(json_value)? + "\n",
        EvalOutput::Table => table.to_string(),
    };
    match output {
        Some(path) => {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, rendered)?;
        }
        None => print!("{rendered}"),
    }
    Ok(())
}
