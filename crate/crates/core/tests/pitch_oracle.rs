//! Exhaustive geometric oracle for the keypoint catalogue: enumerate every
//! pairwise element intersection, circle tangency point (against straight
//! marking directions), and designated mark, then demand set equality with
//! the shipped catalogue.

use gsr_core::pitch::{ElementGeometry, PitchDimensions, PitchModel};
use nalgebra::{Point3, Vector3};

const TOL: f64 = 1e-9;

fn segment_intersection(
    a0: Point3<f64>,
    a1: Point3<f64>,
    b0: Point3<f64>,
    b1: Point3<f64>,
) -> Option<Point3<f64>> {
    // Closest points of the two infinite lines; accept when they coincide
    // within tolerance and both parameters fall inside the segments.
    let da = a1 - a0;
    let db = b1 - b0;
    let r = a0 - b0;
    let aa = da.dot(&da);
    let bb = db.dot(&db);
    let ab = da.dot(&db);
    let denom = aa * bb - ab * ab;
    if denom.abs() < 1e-12 * aa * bb {
        return None; // parallel
    }
    let s = (ab * db.dot(&r) - bb * da.dot(&r)) / denom;
    let t = (aa * db.dot(&r) - ab * da.dot(&r)) / denom;
    if !(-1e-12..=1.0 + 1e-12).contains(&s) || !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return None;
    }
    let pa = a0 + da * s;
    let pb = b0 + db * t;
    ((pa - pb).norm() < TOL).then_some(pa)
}

fn arc_contains(arc: &gsr_core::pitch::Arc3, theta: f64) -> bool {
    let tau = std::f64::consts::TAU;
    let mut t = (theta - arc.start_angle) % tau;
    if t < 0.0 {
        t += tau;
    }
    t <= arc.end_angle - arc.start_angle + 1e-9
}

fn arc_segment_intersections(
    arc: &gsr_core::pitch::Arc3,
    a: Point3<f64>,
    b: Point3<f64>,
) -> Vec<Point3<f64>> {
    // Ground-plane circle against a ground segment.
    if a.z.abs() > TOL || b.z.abs() > TOL || arc.center.z.abs() > TOL {
        return Vec::new();
    }
    let d = b - a;
    let f = a - arc.center;
    let qa = d.x * d.x + d.y * d.y;
    let qb = 2.0 * (f.x * d.x + f.y * d.y);
    let qc = f.x * f.x + f.y * f.y - arc.radius * arc.radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 || qa < 1e-18 {
        return Vec::new();
    }
    let sqrt_disc = disc.sqrt();
    let mut out = Vec::new();
    for sign in [-1.0, 1.0] {
        let t = (-qb + sign * sqrt_disc) / (2.0 * qa);
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            continue;
        }
        let p = a + d * t;
        let theta = (p.y - arc.center.y).atan2(p.x - arc.center.x);
        if arc_contains(arc, theta) {
            out.push(p);
        }
    }
    out
}

fn arc_arc_intersections(
    a: &gsr_core::pitch::Arc3,
    b: &gsr_core::pitch::Arc3,
) -> Vec<Point3<f64>> {
    let d = b.center - a.center;
    let dist = (d.x * d.x + d.y * d.y).sqrt();
    if dist < 1e-12 || dist > a.radius + b.radius || dist < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let h = (a.radius * a.radius - b.radius * b.radius + dist * dist) / (2.0 * dist);
    let k2 = a.radius * a.radius - h * h;
    if k2 < 0.0 {
        return Vec::new();
    }
    let k = k2.sqrt();
    let ex = d.x / dist;
    let ey = d.y / dist;
    let base = Point3::new(a.center.x + h * ex, a.center.y + h * ey, 0.0);
    let mut out = Vec::new();
    for sign in [-1.0, 1.0] {
        let p = Point3::new(base.x - sign * k * ey, base.y + sign * k * ex, 0.0);
        let ta = (p.y - a.center.y).atan2(p.x - a.center.x);
        let tb = (p.y - b.center.y).atan2(p.x - b.center.x);
        if arc_contains(a, ta) && arc_contains(b, tb) {
            out.push(p);
        }
    }
    out
}

fn tangency_points(
    arc: &gsr_core::pitch::Arc3,
    directions: &[Vector3<f64>],
) -> Vec<Point3<f64>> {
    let mut out = Vec::new();
    for d in directions {
        if d.x * d.x + d.y * d.y < 1e-18 {
            continue; // vertical member: arc tangents are never parallel
        }
        let theta0 = (-d.x).atan2(d.y);
        for theta in [theta0, theta0 + std::f64::consts::PI] {
            if arc_contains(arc, theta) {
                out.push(Point3::new(
                    arc.center.x + arc.radius * theta.cos(),
                    arc.center.y + arc.radius * theta.sin(),
                    0.0,
                ));
            }
        }
    }
    out
}

fn enumerate_oracle(model: &PitchModel) -> Vec<Point3<f64>> {
    let elements = model.elements();
    let mut points: Vec<Point3<f64>> = Vec::new();
    let mut push = |p: Point3<f64>| {
        if !points.iter().any(|q| (q - p).norm() < 1e-6) {
            points.push(p);
        }
    };

    let directions: Vec<Vector3<f64>> = elements
        .iter()
        .filter_map(|e| match &e.geometry {
            ElementGeometry::Segment(s) => Some((s.b - s.a).normalize()),
            ElementGeometry::Arc(_) => None,
        })
        .collect();

    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            match (&elements[i].geometry, &elements[j].geometry) {
                (ElementGeometry::Segment(s), ElementGeometry::Segment(t)) => {
                    if let Some(p) = segment_intersection(s.a, s.b, t.a, t.b) {
                        push(p);
                    }
                }
                (ElementGeometry::Segment(s), ElementGeometry::Arc(arc))
                | (ElementGeometry::Arc(arc), ElementGeometry::Segment(s)) => {
                    for p in arc_segment_intersections(arc, s.a, s.b) {
                        push(p);
                    }
                }
                (ElementGeometry::Arc(a), ElementGeometry::Arc(b)) => {
                    for p in arc_arc_intersections(a, b) {
                        push(p);
                    }
                }
            }
        }
    }
    for e in elements {
        if let ElementGeometry::Arc(arc) = &e.geometry {
            for p in tangency_points(arc, &directions) {
                push(p);
            }
        }
    }
    for mark in model.marks() {
        push(mark.position);
    }
    points
}

fn assert_catalogue_matches_oracle(dims: PitchDimensions) {
    let model = PitchModel::build(dims).unwrap();
    let oracle = enumerate_oracle(&model);
    let catalogue = model.keypoints();

    assert_eq!(
        catalogue.len(),
        oracle.len(),
        "catalogue cardinality differs from the exhaustive enumeration"
    );
    for kp in catalogue {
        let hit = oracle.iter().any(|p| (p - kp.position).norm() < 1e-6);
        assert!(hit, "catalogue keypoint {} not found by the oracle", kp.id);
    }
    for p in &oracle {
        let hit = catalogue.iter().any(|kp| (kp.position - p).norm() < 1e-6);
        assert!(hit, "oracle point {p:?} missing from the catalogue");
    }
}

#[test]
fn default_dims_catalogue_equals_enumeration() {
    assert_catalogue_matches_oracle(PitchDimensions::default());
}

#[test]
fn custom_dims_catalogue_equals_enumeration() {
    assert_catalogue_matches_oracle(PitchDimensions {
        length: 100.0,
        width: 64.0,
        ..Default::default()
    });
    assert_catalogue_matches_oracle(PitchDimensions {
        length: 110.0,
        width: 72.0,
        center_circle_radius: 9.15,
        penalty_area_depth: 16.5,
        penalty_area_width: 40.32,
        goal_area_depth: 5.5,
        goal_area_width: 18.32,
        penalty_mark_distance: 11.0,
        goal_width: 7.32,
        goal_height: 2.44,
    });
}

#[test]
fn default_catalogue_has_43_keypoints() {
    let model = PitchModel::build(PitchDimensions::default()).unwrap();
    assert_eq!(model.keypoints().len(), 43);
}
