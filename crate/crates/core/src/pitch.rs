//! Canonical 3D soccer pitch model.
//!
//! Coordinate frame: origin at the pitch center, x toward the right goal
//! line, y toward the far touchline, z up. Ground markings lie in z = 0;
//! goal posts and crossbars extend above it.
//!
//! Line names follow the broadcast annotation convention ("Side line top",
//! "Big rect. left main", "Circle central", ...). Post sides are named from
//! the viewpoint of an observer at the pitch center looking at that goal.
//!
//! # Keypoint catalogue
//!
//! [`PitchModel::keypoints`] enumerates every pairwise marking intersection,
//! circle tangency point, and designated mark, with stable 1-based ids:
//!
//! | id | description | default position (m) |
//! |----|-------------|----------------------|
//! | 1–6 | touchline × goal line / halfway line corners, top row then bottom row | (±52.5 or 0, ±34) |
//! | 7–10 | left penalty area corners (top outer, top inner, bottom inner, bottom outer) | (−52.5/−36, ±20.16) |
//! | 11–14 | left goal area corners, same order | (−52.5/−47, ±9.16) |
//! | 15–18 | right penalty area corners (top outer, top inner, bottom inner, bottom outer) | (52.5/36, ±20.16) |
//! | 19–22 | right goal area corners, same order | (52.5/47, ±9.16) |
//! | 23–26 | left goal: crossbar × left post, crossbar × right post, left post base, right post base | (−52.5, ∓3.66, 2.44/0) |
//! | 27–30 | right goal, same order | (52.5, ±3.66, 2.44/0) |
//! | 31–32 | center circle × halfway line, top then bottom | (0, ±9.15) |
//! | 33–34 | center circle tangent points, left then right | (∓9.15, 0) |
//! | 35–37 | left penalty arc × penalty area line (top, bottom), arc apex | (−36, ±7.31) / (−32.35, 0) |
//! | 38–40 | right penalty arc, same order | (36, ±7.31) / (32.35, 0) |
//! | 41 | center mark | (0, 0) |
//! | 42–43 | penalty marks, left then right | (∓41.5, 0) |

use nalgebra::{Point3, Vector3};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PitchError {
    #[error("invalid pitch dimensions: {0}")]
    InvalidDimensions(String),
}

/// Physical pitch dimensions in meters. Defaults match the common
/// 105 × 68 regulation layout; everything is configurable because
/// broadcast venues vary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchDimensions {
    pub length: f64,
    pub width: f64,
    pub center_circle_radius: f64,
    pub penalty_area_depth: f64,
    pub penalty_area_width: f64,
    pub goal_area_depth: f64,
    pub goal_area_width: f64,
    pub penalty_mark_distance: f64,
    pub goal_width: f64,
    pub goal_height: f64,
}

impl Default for PitchDimensions {
    fn default() -> Self {
        Self {
            length: 105.0,
            width: 68.0,
            center_circle_radius: 9.15,
            penalty_area_depth: 16.5,
            penalty_area_width: 40.32,
            goal_area_depth: 5.5,
            goal_area_width: 18.32,
            penalty_mark_distance: 11.0,
            goal_width: 7.32,
            goal_height: 2.44,
        }
    }
}

impl PitchDimensions {
    pub fn validate(&self) -> Result<(), PitchError> {
        let all = [
            ("length", self.length),
            ("width", self.width),
            ("center_circle_radius", self.center_circle_radius),
            ("penalty_area_depth", self.penalty_area_depth),
            ("penalty_area_width", self.penalty_area_width),
            ("goal_area_depth", self.goal_area_depth),
            ("goal_area_width", self.goal_area_width),
            ("penalty_mark_distance", self.penalty_mark_distance),
            ("goal_width", self.goal_width),
            ("goal_height", self.goal_height),
        ];
        for (name, v) in all {
            if !(v > 0.0) || !v.is_finite() {
                return Err(PitchError::InvalidDimensions(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.penalty_area_width >= self.width {
            return Err(PitchError::InvalidDimensions(
                "penalty_area_width must be smaller than width".into(),
            ));
        }
        if self.goal_area_depth >= self.penalty_area_depth {
            return Err(PitchError::InvalidDimensions(
                "goal_area_depth must be smaller than penalty_area_depth".into(),
            ));
        }
        if self.goal_area_width >= self.penalty_area_width {
            return Err(PitchError::InvalidDimensions(
                "goal_area_width must be smaller than penalty_area_width".into(),
            ));
        }
        if self.penalty_area_depth >= self.length / 2.0 {
            return Err(PitchError::InvalidDimensions(
                "penalty_area_depth must be smaller than half the length".into(),
            ));
        }
        if self.penalty_mark_distance >= self.penalty_area_depth {
            return Err(PitchError::InvalidDimensions(
                "penalty_mark_distance must be smaller than penalty_area_depth".into(),
            ));
        }
        Ok(())
    }
}

/// Straight marking between two 3D endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment3 {
    pub a: Point3<f64>,
    pub b: Point3<f64>,
}

impl Segment3 {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn point_at(&self, t: f64) -> Point3<f64> {
        self.a + (self.b - self.a) * t
    }
}

/// Circular arc in a plane of constant z, parameterized by angle from the
/// +x axis. A full circle has `end_angle - start_angle == 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc3 {
    pub center: Point3<f64>,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
}

impl Arc3 {
    pub fn point_at(&self, theta: f64) -> Point3<f64> {
        self.center + Vector3::new(self.radius * theta.cos(), self.radius * theta.sin(), 0.0)
    }

    pub fn is_full_circle(&self) -> bool {
        (self.end_angle - self.start_angle - std::f64::consts::TAU).abs() < 1e-12
    }

    /// Whether the angle (any winding) falls inside the arc span.
    pub fn contains_angle(&self, theta: f64) -> bool {
        let tau = std::f64::consts::TAU;
        let mut t = (theta - self.start_angle) % tau;
        if t < 0.0 {
            t += tau;
        }
        t <= self.end_angle - self.start_angle + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementGeometry {
    Segment(Segment3),
    Arc(Arc3),
}

/// A named pitch marking: a straight segment or a circle/arc.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchElement {
    pub name: String,
    pub geometry: ElementGeometry,
}

impl PitchElement {
    fn segment(name: &str, a: [f64; 3], b: [f64; 3]) -> Self {
        Self {
            name: name.to_owned(),
            geometry: ElementGeometry::Segment(Segment3 {
                a: Point3::new(a[0], a[1], a[2]),
                b: Point3::new(b[0], b[1], b[2]),
            }),
        }
    }

    fn arc(name: &str, center: [f64; 2], radius: f64, start: f64, end: f64) -> Self {
        Self {
            name: name.to_owned(),
            geometry: ElementGeometry::Arc(Arc3 {
                center: Point3::new(center[0], center[1], 0.0),
                radius,
                start_angle: start,
                end_angle: end,
            }),
        }
    }

    /// Minimum distance from a point to the element geometry.
    pub fn distance_to(&self, p: &Point3<f64>) -> f64 {
        match &self.geometry {
            ElementGeometry::Segment(s) => {
                let d = s.b - s.a;
                let len2 = d.norm_squared();
                let t = if len2 > 0.0 {
                    ((p - s.a).dot(&d) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (p - s.point_at(t)).norm()
            }
            ElementGeometry::Arc(arc) => {
                let rel = p - arc.center;
                let theta = rel.y.atan2(rel.x);
                if arc.contains_angle(theta) {
                    let planar = (rel.x * rel.x + rel.y * rel.y).sqrt();
                    ((planar - arc.radius).powi(2) + rel.z * rel.z).sqrt()
                } else {
                    let da = (p - arc.point_at(arc.start_angle)).norm();
                    let db = (p - arc.point_at(arc.end_angle)).norm();
                    da.min(db)
                }
            }
        }
    }
}

/// A designated mark that is a point rather than a line (penalty marks,
/// center mark).
#[derive(Debug, Clone, PartialEq)]
pub struct PitchMark {
    pub name: String,
    pub position: Point3<f64>,
}

/// Catalogue keypoint: a stable integer id plus its 3D pitch position.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchKeypoint {
    pub id: u32,
    pub position: Point3<f64>,
    pub description: String,
}

impl PitchKeypoint {
    pub fn is_ground(&self) -> bool {
        self.position.z.abs() < 1e-9
    }
}

/// Immutable pitch model: elements, marks, and the derived keypoint
/// catalogue. Safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchModel {
    dims: PitchDimensions,
    elements: Vec<PitchElement>,
    marks: Vec<PitchMark>,
    keypoints: Vec<PitchKeypoint>,
}

/// Builds the canonical pitch for the given dimensions.
pub fn build_pitch(dims: PitchDimensions) -> Result<PitchModel, PitchError> {
    PitchModel::build(dims)
}

impl PitchModel {
    pub fn build(dims: PitchDimensions) -> Result<Self, PitchError> {
        dims.validate()?;
        let elements = build_elements(&dims);
        let marks = build_marks(&dims);
        let keypoints = build_keypoints(&dims);
        Ok(Self {
            dims,
            elements,
            marks,
            keypoints,
        })
    }

    pub fn dims(&self) -> &PitchDimensions {
        &self.dims
    }

    pub fn elements(&self) -> &[PitchElement] {
        &self.elements
    }

    pub fn marks(&self) -> &[PitchMark] {
        &self.marks
    }

    /// Keypoint catalogue in the documented stable order.
    pub fn keypoints(&self) -> &[PitchKeypoint] {
        &self.keypoints
    }

    pub fn element(&self, name: &str) -> Option<&PitchElement> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn keypoint(&self, id: u32) -> Option<&PitchKeypoint> {
        self.keypoints.iter().find(|k| k.id == id)
    }

    /// JSON export of the catalogue and line names for cross-tool checks.
    pub fn catalogue_json(&self) -> serde_json::Value {
        let keypoints: Vec<serde_json::Value> = self
            .keypoints
            .iter()
            .map(|k| {
                json!({
                    "id": k.id,
                    "description": k.description,
                    "position": [k.position.x, k.position.y, k.position.z],
                })
            })
            .collect();
        let lines: Vec<&str> = self.elements.iter().map(|e| e.name.as_str()).collect();
        json!({ "keypoints": keypoints, "lines": lines })
    }
}

/// Samples points along an element with consecutive arc-length gaps of at
/// most `spacing`. Segment and open-arc endpoints are always included; a
/// full circle is sampled without repeating the seam point.
pub fn sample_element(elem: &PitchElement, spacing: f64) -> Vec<Point3<f64>> {
    assert!(spacing > 0.0, "spacing must be positive");
    match &elem.geometry {
        ElementGeometry::Segment(s) => {
            let n = (s.length() / spacing).ceil().max(1.0) as usize;
            (0..=n).map(|i| s.point_at(i as f64 / n as f64)).collect()
        }
        ElementGeometry::Arc(arc) => {
            let span = arc.end_angle - arc.start_angle;
            let arc_len = arc.radius * span;
            let n = (arc_len / spacing).ceil().max(1.0) as usize;
            if arc.is_full_circle() {
                (0..n)
                    .map(|i| arc.point_at(arc.start_angle + span * i as f64 / n as f64))
                    .collect()
            } else {
                (0..=n)
                    .map(|i| arc.point_at(arc.start_angle + span * i as f64 / n as f64))
                    .collect()
            }
        }
    }
}

fn build_elements(d: &PitchDimensions) -> Vec<PitchElement> {
    let hl = d.length / 2.0;
    let hw = d.width / 2.0;
    let paw = d.penalty_area_width / 2.0;
    let gaw = d.goal_area_width / 2.0;
    let gw = d.goal_width / 2.0;
    let gh = d.goal_height;
    let pax_l = -hl + d.penalty_area_depth;
    let gax_l = -hl + d.goal_area_depth;
    let pax_r = hl - d.penalty_area_depth;
    let gax_r = hl - d.goal_area_depth;
    let pmx_l = -hl + d.penalty_mark_distance;
    let pmx_r = hl - d.penalty_mark_distance;
    let r = d.center_circle_radius;

    let mut v = vec![
        PitchElement::segment("Side line top", [-hl, hw, 0.0], [hl, hw, 0.0]),
        PitchElement::segment("Side line bottom", [-hl, -hw, 0.0], [hl, -hw, 0.0]),
        PitchElement::segment("Side line left", [-hl, -hw, 0.0], [-hl, hw, 0.0]),
        PitchElement::segment("Side line right", [hl, -hw, 0.0], [hl, hw, 0.0]),
        PitchElement::segment("Middle line", [0.0, -hw, 0.0], [0.0, hw, 0.0]),
        PitchElement::segment("Big rect. left top", [-hl, paw, 0.0], [pax_l, paw, 0.0]),
        PitchElement::segment("Big rect. left main", [pax_l, -paw, 0.0], [pax_l, paw, 0.0]),
        PitchElement::segment("Big rect. left bottom", [-hl, -paw, 0.0], [pax_l, -paw, 0.0]),
        PitchElement::segment("Big rect. right top", [pax_r, paw, 0.0], [hl, paw, 0.0]),
        PitchElement::segment("Big rect. right main", [pax_r, -paw, 0.0], [pax_r, paw, 0.0]),
        PitchElement::segment("Big rect. right bottom", [pax_r, -paw, 0.0], [hl, -paw, 0.0]),
        PitchElement::segment("Small rect. left top", [-hl, gaw, 0.0], [gax_l, gaw, 0.0]),
        PitchElement::segment("Small rect. left main", [gax_l, -gaw, 0.0], [gax_l, gaw, 0.0]),
        PitchElement::segment("Small rect. left bottom", [-hl, -gaw, 0.0], [gax_l, -gaw, 0.0]),
        PitchElement::segment("Small rect. right top", [gax_r, gaw, 0.0], [hl, gaw, 0.0]),
        PitchElement::segment("Small rect. right main", [gax_r, -gaw, 0.0], [gax_r, gaw, 0.0]),
        PitchElement::segment("Small rect. right bottom", [gax_r, -gaw, 0.0], [hl, -gaw, 0.0]),
        // Goal frames. "left"/"right" post names are from an observer at the
        // pitch center looking at that goal.
        PitchElement::segment("Goal left crossbar", [-hl, -gw, gh], [-hl, gw, gh]),
        PitchElement::segment("Goal left post left", [-hl, -gw, 0.0], [-hl, -gw, gh]),
        PitchElement::segment("Goal left post right", [-hl, gw, 0.0], [-hl, gw, gh]),
        PitchElement::segment("Goal right crossbar", [hl, -gw, gh], [hl, gw, gh]),
        PitchElement::segment("Goal right post left", [hl, gw, 0.0], [hl, gw, gh]),
        PitchElement::segment("Goal right post right", [hl, -gw, 0.0], [hl, -gw, gh]),
        PitchElement::arc("Circle central", [0.0, 0.0], r, 0.0, std::f64::consts::TAU),
    ];

    // Penalty arcs exist only when the circle radius reaches past the
    // penalty area line.
    let dx = d.penalty_area_depth - d.penalty_mark_distance;
    if r > dx {
        let theta0 = (dx / r).acos();
        v.push(PitchElement::arc(
            "Circle left",
            [pmx_l, 0.0],
            r,
            -theta0,
            theta0,
        ));
        v.push(PitchElement::arc(
            "Circle right",
            [pmx_r, 0.0],
            r,
            std::f64::consts::PI - theta0,
            std::f64::consts::PI + theta0,
        ));
    }
    v
}

fn build_marks(d: &PitchDimensions) -> Vec<PitchMark> {
    let hl = d.length / 2.0;
    [
        ("Center mark", 0.0),
        ("Penalty mark left", -hl + d.penalty_mark_distance),
        ("Penalty mark right", hl - d.penalty_mark_distance),
    ]
    .into_iter()
    .map(|(name, x)| PitchMark {
        name: name.to_owned(),
        position: Point3::new(x, 0.0, 0.0),
    })
    .collect()
}

fn build_keypoints(d: &PitchDimensions) -> Vec<PitchKeypoint> {
    let hl = d.length / 2.0;
    let hw = d.width / 2.0;
    let paw = d.penalty_area_width / 2.0;
    let gaw = d.goal_area_width / 2.0;
    let gw = d.goal_width / 2.0;
    let gh = d.goal_height;
    let pax_l = -hl + d.penalty_area_depth;
    let gax_l = -hl + d.goal_area_depth;
    let pax_r = hl - d.penalty_area_depth;
    let gax_r = hl - d.goal_area_depth;
    let pmx_l = -hl + d.penalty_mark_distance;
    let pmx_r = hl - d.penalty_mark_distance;
    let r = d.center_circle_radius;

    let mut pts: Vec<(&str, [f64; 3])> = vec![
        ("Side line top x Side line left", [-hl, hw, 0.0]),
        ("Side line top x Middle line", [0.0, hw, 0.0]),
        ("Side line top x Side line right", [hl, hw, 0.0]),
        ("Side line bottom x Side line left", [-hl, -hw, 0.0]),
        ("Side line bottom x Middle line", [0.0, -hw, 0.0]),
        ("Side line bottom x Side line right", [hl, -hw, 0.0]),
        ("Big rect. left top x Side line left", [-hl, paw, 0.0]),
        ("Big rect. left top x Big rect. left main", [pax_l, paw, 0.0]),
        ("Big rect. left bottom x Big rect. left main", [pax_l, -paw, 0.0]),
        ("Big rect. left bottom x Side line left", [-hl, -paw, 0.0]),
        ("Small rect. left top x Side line left", [-hl, gaw, 0.0]),
        ("Small rect. left top x Small rect. left main", [gax_l, gaw, 0.0]),
        ("Small rect. left bottom x Small rect. left main", [gax_l, -gaw, 0.0]),
        ("Small rect. left bottom x Side line left", [-hl, -gaw, 0.0]),
        ("Big rect. right top x Side line right", [hl, paw, 0.0]),
        ("Big rect. right top x Big rect. right main", [pax_r, paw, 0.0]),
        ("Big rect. right bottom x Big rect. right main", [pax_r, -paw, 0.0]),
        ("Big rect. right bottom x Side line right", [hl, -paw, 0.0]),
        ("Small rect. right top x Side line right", [hl, gaw, 0.0]),
        ("Small rect. right top x Small rect. right main", [gax_r, gaw, 0.0]),
        ("Small rect. right bottom x Small rect. right main", [gax_r, -gaw, 0.0]),
        ("Small rect. right bottom x Side line right", [hl, -gaw, 0.0]),
        ("Goal left crossbar x Goal left post left", [-hl, -gw, gh]),
        ("Goal left crossbar x Goal left post right", [-hl, gw, gh]),
        ("Goal left post left base", [-hl, -gw, 0.0]),
        ("Goal left post right base", [-hl, gw, 0.0]),
        ("Goal right crossbar x Goal right post left", [hl, gw, gh]),
        ("Goal right crossbar x Goal right post right", [hl, -gw, gh]),
        ("Goal right post left base", [hl, gw, 0.0]),
        ("Goal right post right base", [hl, -gw, 0.0]),
        ("Circle central x Middle line top", [0.0, r, 0.0]),
        ("Circle central x Middle line bottom", [0.0, -r, 0.0]),
        ("Circle central left tangent", [-r, 0.0, 0.0]),
        ("Circle central right tangent", [r, 0.0, 0.0]),
    ];

    let dx = d.penalty_area_depth - d.penalty_mark_distance;
    if r > dx {
        let ya = (r * r - dx * dx).sqrt();
        pts.push(("Circle left x Big rect. left main top", [pax_l, ya, 0.0]));
        pts.push(("Circle left x Big rect. left main bottom", [pax_l, -ya, 0.0]));
        pts.push(("Circle left apex", [pmx_l + r, 0.0, 0.0]));
        pts.push(("Circle right x Big rect. right main top", [pax_r, ya, 0.0]));
        pts.push(("Circle right x Big rect. right main bottom", [pax_r, -ya, 0.0]));
        pts.push(("Circle right apex", [pmx_r - r, 0.0, 0.0]));
    }
    pts.push(("Center mark", [0.0, 0.0, 0.0]));
    pts.push(("Penalty mark left", [pmx_l, 0.0, 0.0]));
    pts.push(("Penalty mark right", [pmx_r, 0.0, 0.0]));

    pts.into_iter()
        .enumerate()
        .map(|(i, (desc, p))| PitchKeypoint {
            id: (i + 1) as u32,
            position: Point3::new(p[0], p[1], p[2]),
            description: desc.to_owned(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_model() -> PitchModel {
        PitchModel::build(PitchDimensions::default()).unwrap()
    }

    #[test]
    fn corners_at_expected_positions() {
        let m = default_model();
        for (x, y) in [(-52.5, -34.0), (-52.5, 34.0), (52.5, -34.0), (52.5, 34.0)] {
            let hit = m
                .keypoints()
                .iter()
                .any(|k| (k.position - Point3::new(x, y, 0.0)).norm() < 1e-12);
            assert!(hit, "missing corner ({x}, {y})");
        }
    }

    #[test]
    fn crossbar_endpoints_right_goal() {
        let m = default_model();
        let e = m.element("Goal right crossbar").unwrap();
        match &e.geometry {
            ElementGeometry::Segment(s) => {
                let ys: Vec<f64> = vec![s.a.y, s.b.y];
                assert!(ys.contains(&3.66) && ys.contains(&-3.66));
                assert_eq!(s.a.x, 52.5);
                assert_eq!(s.a.z, 2.44);
                assert_eq!(s.b.z, 2.44);
            }
            _ => panic!("crossbar must be a segment"),
        }
    }

    #[test]
    fn custom_dims_scale_corners() {
        let dims = PitchDimensions {
            length: 100.0,
            width: 64.0,
            ..Default::default()
        };
        let m = PitchModel::build(dims).unwrap();
        let corner = m
            .keypoints()
            .iter()
            .find(|k| k.description == "Side line top x Side line right")
            .unwrap();
        assert_eq!(corner.position, Point3::new(50.0, 32.0, 0.0));
    }

    #[test]
    fn invalid_dimensions_rejected() {
        let dims = PitchDimensions {
            penalty_area_width: 70.0,
            ..Default::default()
        };
        assert!(PitchModel::build(dims).is_err());
        let dims = PitchDimensions {
            length: -1.0,
            ..Default::default()
        };
        assert!(PitchModel::build(dims).is_err());
    }

    #[test]
    fn halfway_touchline_keypoint() {
        let m = default_model();
        let k = m
            .keypoints()
            .iter()
            .find(|k| k.description == "Side line bottom x Middle line")
            .unwrap();
        assert_eq!(k.position, Point3::new(0.0, -34.0, 0.0));
    }

    #[test]
    fn center_mark_keypoint() {
        let m = default_model();
        let k = m
            .keypoints()
            .iter()
            .find(|k| k.description == "Center mark")
            .unwrap();
        assert_eq!(k.position, Point3::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn element_and_mark_names_unique() {
        let m = default_model();
        let mut names: Vec<&str> = m
            .elements()
            .iter()
            .map(|e| e.name.as_str())
            .chain(m.marks().iter().map(|mk| mk.name.as_str()))
            .collect();
        let before = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(before, names.len());
    }

    #[test]
    fn keypoint_ids_unique_and_stable() {
        let a = default_model();
        let b = default_model();
        assert_eq!(a.keypoints(), b.keypoints());
        let mut ids: Vec<u32> = a.keypoints().iter().map(|k| k.id).collect();
        ids.dedup();
        assert_eq!(ids.len(), a.keypoints().len());
        assert_eq!(ids.first(), Some(&1));
    }

    #[test]
    fn segment_sampling_includes_endpoints() {
        let e = PitchElement::segment("t", [0.0, 0.0, 0.0], [0.0, 10.0, 0.0]);
        let pts = sample_element(&e, 5.0);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], Point3::new(0.0, 0.0, 0.0));
        assert_eq!(pts[1], Point3::new(0.0, 5.0, 0.0));
        assert_eq!(pts[2], Point3::new(0.0, 10.0, 0.0));
    }

    #[test]
    fn full_circle_sampling_has_no_seam_duplicate() {
        let m = default_model();
        let circle = m.element("Circle central").unwrap();
        let spacing = std::f64::consts::TAU * 9.15 / 8.0;
        let pts = sample_element(circle, spacing);
        assert_eq!(pts.len(), 8);
        for p in &pts {
            let radial = (p.x * p.x + p.y * p.y).sqrt();
            assert!((radial - 9.15).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_points_satisfy_implicit_equation() {
        let m = default_model();
        for e in m.elements() {
            for p in sample_element(e, 0.37) {
                assert!(
                    e.distance_to(&p) < 1e-9,
                    "sample off element {}: {p:?}",
                    e.name
                );
            }
        }
    }

    #[test]
    fn every_keypoint_on_an_element_or_mark() {
        let m = default_model();
        for k in m.keypoints() {
            let on_element = m.elements().iter().any(|e| e.distance_to(&k.position) < 1e-9);
            let on_mark = m
                .marks()
                .iter()
                .any(|mk| (mk.position - k.position).norm() < 1e-9);
            assert!(on_element || on_mark, "keypoint {} floats free", k.id);
        }
    }

    #[test]
    fn mirror_symmetry_both_axes() {
        let m = default_model();
        for flip in [[-1.0, 1.0], [1.0, -1.0]] {
            for e in m.elements() {
                // Every sampled point of the reflected element must land on
                // some element of the model.
                for p in sample_element(e, 1.0) {
                    let q = Point3::new(p.x * flip[0], p.y * flip[1], p.z);
                    let best = m
                        .elements()
                        .iter()
                        .map(|o| o.distance_to(&q))
                        .fold(f64::INFINITY, f64::min);
                    assert!(best < 1e-9, "reflection of {} escapes the model", e.name);
                }
            }
        }
    }

    #[test]
    fn catalogue_json_shape() {
        let m = default_model();
        let v = m.catalogue_json();
        assert_eq!(v["keypoints"].as_array().unwrap().len(), m.keypoints().len());
        assert_eq!(v["lines"].as_array().unwrap().len(), m.elements().len());
    }
}
