//! Frame annotation parsing, canonical writing, and the pretraining subset.

use std::collections::BTreeMap;

use nalgebra::{DVector, Point2};
use serde_json::Value;

use super::FormatError;
use crate::calib::{KeypointObservation, LineObservation};
use crate::camera::{CameraParams, ImageSize};
use crate::post::Team;
use crate::track::{AthleteDetection, Bbox, Role};

/// One athlete record of the full pipeline format. Unknown fields are
/// preserved in `extra` for round-tripping.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AthleteRecord {
    pub bbox_ltwh: [f64; 4],
    pub track_id: Option<i64>,
    pub jersey_number: Option<u8>,
    pub legibility_score: Option<f64>,
    pub role: Option<Role>,
    pub team: Option<Team>,
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeypointRecord {
    pub x: f64,
    pub y: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraMatrices {
    pub k: [[f64; 3]; 3],
    pub rt: [[f64; 4]; 3],
}

impl CameraMatrices {
    pub fn from_params(params: &CameraParams) -> Self {
        Self {
            k: params.k_rows(),
            rt: params.rt_rows(),
        }
    }

    pub fn to_params(&self) -> CameraParams {
        CameraParams::from_k_rt(&self.k, &self.rt)
    }
}

/// Full per-frame annotation record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameAnnotation {
    pub athletes: Vec<AthleteRecord>,
    pub keypoints: BTreeMap<u32, KeypointRecord>,
    pub lines: BTreeMap<String, Vec<Point2<f64>>>,
    pub camera: Option<CameraMatrices>,
    pub valid_cam_params: bool,
    pub extra: BTreeMap<String, Value>,
}

impl FrameAnnotation {
    pub fn camera_params(&self) -> Option<CameraParams> {
        self.camera.as_ref().map(CameraMatrices::to_params)
    }

    pub fn set_camera(&mut self, params: Option<&CameraParams>, valid: bool) {
        self.camera = params.map(CameraMatrices::from_params);
        self.valid_cam_params = valid && self.camera.is_some();
    }

    pub fn keypoint_observations(&self) -> Vec<KeypointObservation> {
        self.keypoints
            .iter()
            .map(|(&id, r)| KeypointObservation {
                id,
                x: r.x,
                y: r.y,
                confidence: r.p,
            })
            .collect()
    }

    pub fn line_observations(&self) -> Vec<LineObservation> {
        self.lines
            .iter()
            .map(|(name, points)| LineObservation {
                name: name.clone(),
                points: points.clone(),
            })
            .collect()
    }
}

impl AthleteRecord {
    pub fn from_detection(det: &AthleteDetection, track_id: Option<i64>) -> Self {
        Self {
            bbox_ltwh: det.bbox.ltwh(),
            track_id,
            jersey_number: det.jersey,
            legibility_score: Some(det.legibility),
            role: Some(det.role),
            team: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn to_detection(&self, embedding: Option<DVector<f64>>) -> AthleteDetection {
        AthleteDetection {
            bbox: Bbox::from_ltwh(self.bbox_ltwh),
            role: self.role.unwrap_or(Role::Unknown),
            jersey: self.jersey_number,
            legibility: self.legibility_score.unwrap_or(0.0),
            embedding,
            confidence: 1.0,
        }
    }
}

/// Pretraining subset: athletes reduced to four fields, no camera block.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PretrainFrameAnnotation {
    pub athletes: Vec<PretrainAthleteRecord>,
    pub keypoints: BTreeMap<u32, KeypointRecord>,
    pub lines: BTreeMap<String, Vec<Point2<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PretrainAthleteRecord {
    pub bbox_ltwh: [f64; 4],
    pub track_id: Option<i64>,
    pub jersey_number: Option<u8>,
    pub role: Option<Role>,
}

/// Drops camera, team, and legibility fields; jersey numbers go through the
/// legibility filter (threshold 0.5) first. Records without a legibility
/// score keep their jersey as-is.
pub fn to_pretrain_subset(annotation: &FrameAnnotation) -> PretrainFrameAnnotation {
    PretrainFrameAnnotation {
        athletes: annotation
            .athletes
            .iter()
            .map(|a| PretrainAthleteRecord {
                bbox_ltwh: a.bbox_ltwh,
                track_id: a.track_id,
                jersey_number: match a.legibility_score {
                    Some(score) if score < 0.5 => None,
                    _ => a.jersey_number,
                },
                role: a.role,
            })
            .collect(),
        keypoints: annotation.keypoints.clone(),
        lines: annotation.lines.clone(),
    }
}

/// A clip is a map from frame index to its annotation.
pub type ClipAnnotations = BTreeMap<u64, FrameAnnotation>;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a serde_json::Map<String, Value>, FormatError> {
    v.as_object()
        .ok_or_else(|| FormatError::schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array()
        .ok_or_else(|| FormatError::schema(path, "expected an array"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64, FormatError> {
    v.as_f64()
        .ok_or_else(|| FormatError::schema(path, "expected a number"))
}

fn as_bool(v: &Value, path: &str) -> Result<bool, FormatError> {
    v.as_bool()
        .ok_or_else(|| FormatError::schema(path, "expected a boolean"))
}

fn parse_bbox(v: &Value, path: &str) -> Result<[f64; 4], FormatError> {
    let arr = as_array(v, path)?;
    if arr.len() != 4 {
        return Err(FormatError::schema(path, "bbox_ltwh must have 4 entries"));
    }
    let mut out = [0.0; 4];
    for (i, e) in arr.iter().enumerate() {
        out[i] = as_f64(e, &format!("{path}/{i}"))?;
    }
    Ok(out)
}

fn parse_jersey(v: &Value, path: &str) -> Result<Option<u8>, FormatError> {
    let n = match v {
        Value::Null => return Ok(None),
        Value::String(s) => s
            .trim()
            .parse::<i64>()
            .map_err(|_| FormatError::schema(path, "jersey_number string must be an integer"))?,
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| FormatError::schema(path, "jersey_number must be an integer"))?,
        _ => {
            return Err(FormatError::schema(
                path,
                "jersey_number must be a string, integer, or null",
            ))
        }
    };
    if !(0..=99).contains(&n) {
        return Err(FormatError::schema(path, "jersey_number must be in 0..=99"));
    }
    Ok(Some(n as u8))
}

fn parse_role(v: &Value, path: &str) -> Result<Option<Role>, FormatError> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) => match s.as_str() {
            "player" => Ok(Some(Role::Player)),
            "goalkeeper" => Ok(Some(Role::Goalkeeper)),
            "referee" => Ok(Some(Role::Referee)),
            "unknown" => Ok(Some(Role::Unknown)),
            other => Err(FormatError::schema(path, format!("unknown role '{other}'"))),
        },
        _ => Err(FormatError::schema(path, "role must be a string or null")),
    }
}

fn parse_team(v: &Value, path: &str) -> Result<Option<Team>, FormatError> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) => match s.as_str() {
            "left" => Ok(Some(Team::Left)),
            "right" => Ok(Some(Team::Right)),
            other => Err(FormatError::schema(path, format!("unknown team '{other}'"))),
        },
        _ => Err(FormatError::schema(path, "team must be a string or null")),
    }
}

fn parse_athlete(v: &Value, path: &str) -> Result<AthleteRecord, FormatError> {
    let obj = as_object(v, path)?;
    let mut rec = AthleteRecord::default();
    let mut saw_bbox = false;
    for (key, value) in obj {
        let kpath = format!("{path}/{key}");
        match key.as_str() {
            "bbox_ltwh" => {
                rec.bbox_ltwh = parse_bbox(value, &kpath)?;
                saw_bbox = true;
            }
            "track_id" => {
                rec.track_id = match value {
                    Value::Null => None,
                    _ => Some(value.as_i64().ok_or_else(|| {
                        FormatError::schema(&kpath, "track_id must be an integer or null")
                    })?),
                }
            }
            "jersey_number" => rec.jersey_number = parse_jersey(value, &kpath)?,
            "legibility_score" => {
                rec.legibility_score = match value {
                    Value::Null => None,
                    _ => Some(as_f64(value, &kpath)?),
                }
            }
            "role" => rec.role = parse_role(value, &kpath)?,
            "team" => rec.team = parse_team(value, &kpath)?,
            _ => {
                rec.extra.insert(key.clone(), value.clone());
            }
        }
    }
    if !saw_bbox {
        return Err(FormatError::schema(path, "missing bbox_ltwh"));
    }
    Ok(rec)
}

fn parse_keypoints(
    v: &Value,
    path: &str,
) -> Result<BTreeMap<u32, KeypointRecord>, FormatError> {
    let obj = as_object(v, path)?;
    let mut out = BTreeMap::new();
    for (key, value) in obj {
        let kpath = format!("{path}/{key}");
        let id: u32 = key
            .parse()
            .map_err(|_| FormatError::schema(&kpath, "keypoint key must be a non-negative integer"))?;
        let rec = as_object(value, &kpath)?;
        let grab = |field: &str| -> Result<f64, FormatError> {
            rec.get(field)
                .ok_or_else(|| FormatError::schema(&kpath, format!("missing '{field}'")))
                .and_then(|v| as_f64(v, &format!("{kpath}/{field}")))
        };
        out.insert(
            id,
            KeypointRecord {
                x: grab("x")?,
                y: grab("y")?,
                p: grab("p")?,
            },
        );
    }
    Ok(out)
}

fn parse_lines(
    v: &Value,
    path: &str,
) -> Result<BTreeMap<String, Vec<Point2<f64>>>, FormatError> {
    let obj = as_object(v, path)?;
    let mut out = BTreeMap::new();
    for (name, value) in obj {
        let lpath = format!("{path}/{name}");
        let arr = as_array(value, &lpath)?;
        let mut pts = Vec::with_capacity(arr.len());
        for (i, e) in arr.iter().enumerate() {
            let ppath = format!("{lpath}/{i}");
            let pobj = as_object(e, &ppath)?;
            let x = pobj
                .get("x")
                .ok_or_else(|| FormatError::schema(&ppath, "missing 'x'"))
                .and_then(|v| as_f64(v, &format!("{ppath}/x")))?;
            let y = pobj
                .get("y")
                .ok_or_else(|| FormatError::schema(&ppath, "missing 'y'"))
                .and_then(|v| as_f64(v, &format!("{ppath}/y")))?;
            pts.push(Point2::new(x, y));
        }
        out.insert(name.clone(), pts);
    }
    Ok(out)
}

fn parse_matrix<const C: usize>(v: &Value, path: &str) -> Result<[[f64; C]; 3], FormatError> {
    let rows = as_array(v, path)?;
    if rows.len() != 3 {
        return Err(FormatError::schema(path, "expected 3 rows"));
    }
    let mut out = [[0.0; C]; 3];
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}/{i}");
        let cols = as_array(row, &rpath)?;
        if cols.len() != C {
            return Err(FormatError::schema(&rpath, format!("expected {C} columns")));
        }
        for (j, e) in cols.iter().enumerate() {
            out[i][j] = as_f64(e, &format!("{rpath}/{j}"))?;
        }
    }
    Ok(out)
}

/// Parses one frame annotation, preserving unknown fields.
pub fn parse_frame(text: &str) -> Result<FrameAnnotation, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    parse_frame_value(&value, "")
}

fn parse_frame_value(value: &Value, path: &str) -> Result<FrameAnnotation, FormatError> {
    let obj = as_object(value, if path.is_empty() { "/" } else { path })?;
    let mut frame = FrameAnnotation::default();
    let mut k: Option<[[f64; 3]; 3]> = None;
    let mut rt: Option<[[f64; 4]; 3]> = None;
    for (key, v) in obj {
        let kpath = format!("{path}/{key}");
        match key.as_str() {
            "athletes" => {
                let arr = as_array(v, &kpath)?;
                frame.athletes = arr
                    .iter()
                    .enumerate()
                    .map(|(i, a)| parse_athlete(a, &format!("{kpath}/{i}")))
                    .collect::<Result<_, _>>()?;
            }
            "keypoints" => frame.keypoints = parse_keypoints(v, &kpath)?,
            "lines" => frame.lines = parse_lines(v, &kpath)?,
            "K" => k = Some(parse_matrix::<3>(v, &kpath)?),
            "Rt" => rt = Some(parse_matrix::<4>(v, &kpath)?),
            "valid_cam_params" => frame.valid_cam_params = as_bool(v, &kpath)?,
            _ => {
                frame.extra.insert(key.clone(), v.clone());
            }
        }
    }
    frame.camera = match (k, rt) {
        (Some(k), Some(rt)) => Some(CameraMatrices { k, rt }),
        (None, None) => None,
        _ => {
            return Err(FormatError::schema(
                format!("{path}/K"),
                "K and Rt must be present together",
            ))
        }
    };
    Ok(frame)
}

/// Parses a pretraining-subset frame.
pub fn parse_pretrain_frame(text: &str) -> Result<PretrainFrameAnnotation, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value, "/")?;
    let mut out = PretrainFrameAnnotation::default();
    for (key, v) in obj {
        let kpath = format!("/{key}");
        match key.as_str() {
            "athletes" => {
                let arr = as_array(v, &kpath)?;
                out.athletes = arr
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let full = parse_athlete(a, &format!("{kpath}/{i}"))?;
                        Ok(PretrainAthleteRecord {
                            bbox_ltwh: full.bbox_ltwh,
                            track_id: full.track_id,
                            jersey_number: full.jersey_number,
                            role: full.role,
                        })
                    })
                    .collect::<Result<_, FormatError>>()?;
            }
            "keypoints" => out.keypoints = parse_keypoints(v, &kpath)?,
            "lines" => out.lines = parse_lines(v, &kpath)?,
            other => {
                return Err(FormatError::schema(
                    kpath,
                    format!("unexpected field '{other}' in pretraining subset"),
                ))
            }
        }
    }
    Ok(out)
}

/// Parses a clip file: a JSON object keyed by frame index.
pub fn parse_clip(text: &str) -> Result<ClipAnnotations, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value, "/")?;
    let mut out = ClipAnnotations::new();
    for (key, v) in obj {
        let idx: u64 = key
            .parse()
            .map_err(|_| FormatError::schema(format!("/{key}"), "frame key must be an integer"))?;
        out.insert(idx, parse_frame_value(v, &format!("/{key}"))?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Canonical writing
// ---------------------------------------------------------------------------

fn fmt_f64(v: f64) -> String {
    // Shortest round-trip representation, via serde_json's float printer.
    serde_json::to_string(&v).expect("finite float")
}

fn fmt_str(s: &str) -> String {
    serde_json::to_string(s).expect("string encodes")
}

fn write_extra(out: &mut String, extra: &BTreeMap<String, Value>) {
    for (k, v) in extra {
        out.push(',');
        out.push_str(&fmt_str(k));
        out.push(':');
        out.push_str(&serde_json::to_string(v).expect("value encodes"));
    }
}

fn write_athlete(out: &mut String, a: &AthleteRecord) {
    out.push_str("{\"bbox_ltwh\":[");
    for (i, v) in a.bbox_ltwh.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(*v));
    }
    out.push_str("],\"track_id\":");
    match a.track_id {
        Some(id) => out.push_str(&id.to_string()),
        None => out.push_str("null"),
    }
    out.push_str(",\"jersey_number\":");
    match a.jersey_number {
        Some(j) => out.push_str(&format!("\"{j}\"")),
        None => out.push_str("null"),
    }
    out.push_str(",\"legibility_score\":");
    match a.legibility_score {
        Some(s) => out.push_str(&fmt_f64(s)),
        None => out.push_str("null"),
    }
    out.push_str(",\"role\":");
    match a.role {
        Some(r) => out.push_str(&serde_json::to_string(&r).expect("role encodes")),
        None => out.push_str("null"),
    }
    out.push_str(",\"team\":");
    match a.team {
        Some(t) => out.push_str(&serde_json::to_string(&t).expect("team encodes")),
        None => out.push_str("null"),
    }
    write_extra(out, &a.extra);
    out.push('}');
}

fn write_keypoints(out: &mut String, keypoints: &BTreeMap<u32, KeypointRecord>) {
    out.push('{');
    for (i, (id, r)) in keypoints.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "\"{id}\":{{\"x\":{},\"y\":{},\"p\":{}}}",
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.p)
        ));
    }
    out.push('}');
}

fn write_lines(out: &mut String, lines: &BTreeMap<String, Vec<Point2<f64>>>) {
    out.push('{');
    for (i, (name, pts)) in lines.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_str(name));
        out.push_str(":[");
        for (j, p) in pts.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{{\"x\":{},\"y\":{}}}", fmt_f64(p.x), fmt_f64(p.y)));
        }
        out.push(']');
    }
    out.push('}');
}

fn write_matrix<const C: usize>(out: &mut String, m: &[[f64; C]; 3]) {
    out.push('[');
    for (i, row) in m.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(*v));
        }
        out.push(']');
    }
    out.push(']');
}

/// Canonical serialization of a frame annotation.
pub fn write_frame(frame: &FrameAnnotation) -> String {
    let mut out = String::new();
    out.push_str("{\"athletes\":[");
    for (i, a) in frame.athletes.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_athlete(&mut out, a);
    }
    out.push_str("],\"keypoints\":");
    write_keypoints(&mut out, &frame.keypoints);
    out.push_str(",\"lines\":");
    write_lines(&mut out, &frame.lines);
    if let Some(cam) = &frame.camera {
        out.push_str(",\"K\":");
        write_matrix(&mut out, &cam.k);
        out.push_str(",\"Rt\":");
        write_matrix(&mut out, &cam.rt);
    }
    out.push_str(",\"valid_cam_params\":");
    out.push_str(if frame.valid_cam_params { "true" } else { "false" });
    write_extra(&mut out, &frame.extra);
    out.push('}');
    out
}

/// Canonical serialization of a pretraining-subset frame. Athlete records
/// carry exactly bbox_ltwh, track_id, jersey_number, and role.
pub fn write_pretrain_frame(frame: &PretrainFrameAnnotation) -> String {
    let mut out = String::new();
    out.push_str("{\"athletes\":[");
    for (i, a) in frame.athletes.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"bbox_ltwh\":[");
        for (j, v) in a.bbox_ltwh.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(*v));
        }
        out.push_str("],\"track_id\":");
        match a.track_id {
            Some(id) => out.push_str(&id.to_string()),
            None => out.push_str("null"),
        }
        out.push_str(",\"jersey_number\":");
        match a.jersey_number {
            Some(j) => out.push_str(&format!("\"{j}\"")),
            None => out.push_str("null"),
        }
        out.push_str(",\"role\":");
        match a.role {
            Some(r) => out.push_str(&serde_json::to_string(&r).expect("role encodes")),
            None => out.push_str("null"),
        }
        out.push('}');
    }
    out.push_str("],\"keypoints\":");
    write_keypoints(&mut out, &frame.keypoints);
    out.push_str(",\"lines\":");
    write_lines(&mut out, &frame.lines);
    out.push('}');
    out
}

/// Canonical serialization of a clip: frames in numeric order.
pub fn write_clip(clip: &ClipAnnotations) -> String {
    let mut out = String::from("{");
    for (i, (frame_idx, frame)) in clip.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\"{frame_idx}\":"));
        out.push_str(&write_frame(frame));
    }
    out.push('}');
    out
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Coordinate-convention guard: flags keypoints outside the image bounds,
/// line coordinates outside [0, 1], degenerate boxes, and non-finite or
/// out-of-range scores.
pub fn validate_frame(frame: &FrameAnnotation, image: ImageSize) -> Vec<String> {
    let mut violations = Vec::new();
    for (id, kp) in &frame.keypoints {
        if !kp.x.is_finite() || !kp.y.is_finite() || !image.contains(kp.x, kp.y) {
            violations.push(format!(
                "keypoint {id} at ({}, {}) outside image bounds {}x{}",
                kp.x, kp.y, image.width, image.height
            ));
        }
        if !(0.0..=1.0).contains(&kp.p) {
            violations.push(format!("keypoint {id} confidence {} outside [0,1]", kp.p));
        }
    }
    for (name, pts) in &frame.lines {
        if pts.len() < 2 {
            violations.push(format!("line '{name}' has fewer than 2 points"));
        }
        for (i, p) in pts.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y) {
                violations.push(format!(
                    "line '{name}' point {i} at ({}, {}) outside [0,1]",
                    p.x, p.y
                ));
            }
        }
    }
    for (i, a) in frame.athletes.iter().enumerate() {
        if !(a.bbox_ltwh[2] > 0.0) || !(a.bbox_ltwh[3] > 0.0) {
            violations.push(format!("athlete {i} bbox has non-positive size"));
        }
        if let Some(s) = a.legibility_score {
            if !(0.0..=1.0).contains(&s) {
                violations.push(format!("athlete {i} legibility {s} outside [0,1]"));
            }
        }
    }
    violations
}
