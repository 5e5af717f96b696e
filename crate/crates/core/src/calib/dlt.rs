//! Direct linear transform for the ground-plane homography, with Hartley
//! normalization. Supports plain point correspondences and, for sparse
//! frames, line correspondences of the form l^T H X = 0.

use nalgebra::{DMatrix, Matrix3, Point2, Vector3};

use super::CalibError;

/// A straight ground marking paired with the image line fitted to its
/// detected points. Both world endpoints constrain the homography without
/// needing an endpoint-to-endpoint assignment.
#[derive(Debug, Clone)]
pub struct LineCorrespondence {
    pub world_a: Point2<f64>,
    pub world_b: Point2<f64>,
    /// Image line (a, b, c) with a*x + b*y + c = 0 in pixels.
    pub image_line: Vector3<f64>,
}

/// Least-squares homography from ≥ 4 (world ground, image px) pairs.
/// The result maps (X, Y, 1) homogeneously to image points, has unit
/// Frobenius norm, and positive homogeneous w on the input set.
pub fn estimate_homography_dlt(
    pairs: &[(Point2<f64>, Point2<f64>)],
) -> Result<Matrix3<f64>, CalibError> {
    estimate_homography_points_lines(pairs, &[])
}

/// DLT over mixed point and line correspondences. Points contribute two
/// rows each, lines two rows (one per world endpoint).
pub fn estimate_homography_points_lines(
    pairs: &[(Point2<f64>, Point2<f64>)],
    lines: &[LineCorrespondence],
) -> Result<Matrix3<f64>, CalibError> {
    let rows = 2 * pairs.len() + 2 * lines.len();
    if pairs.len() + lines.len() < 4 || rows < 8 {
        return Err(CalibError::InsufficientCorrespondences {
            needed: 4,
            got: pairs.len() + lines.len(),
        });
    }

    let t_world = normalizing_similarity(pairs.iter().map(|(w, _)| *w).chain(
        lines.iter().flat_map(|l| [l.world_a, l.world_b]),
    ));
    let t_image = normalizing_similarity(pairs.iter().map(|(_, i)| *i));
    let t_image_inv_t = t_image
        .transpose()
        .try_inverse()
        .ok_or(CalibError::DegenerateConfiguration)?;

    // Pad to at least 9 rows: the thin SVD of an 8×9 system would not
    // expose the null-space vector.
    let mut a = DMatrix::<f64>::zeros(rows.max(9), 9);
    let mut r = 0;
    for (world, img) in pairs {
        let w = t_world * Vector3::new(world.x, world.y, 1.0);
        let i = t_image * Vector3::new(img.x, img.y, 1.0);
        let (xx, yy) = (w.x / w.z, w.y / w.z);
        let (u, v) = (i.x / i.z, i.y / i.z);
        a.row_mut(r).copy_from_slice(&[
            -xx, -yy, -1.0, 0.0, 0.0, 0.0, u * xx, u * yy, u,
        ]);
        a.row_mut(r + 1).copy_from_slice(&[
            0.0, 0.0, 0.0, -xx, -yy, -1.0, v * xx, v * yy, v,
        ]);
        r += 2;
    }
    for lc in lines {
        // Lines transform contravariantly: l' = T^-T l, rescaled to a unit
        // normal so rows are commensurate with the point rows.
        let mut l = t_image_inv_t * lc.image_line;
        let n = l.xy().norm();
        if n < 1e-12 {
            return Err(CalibError::DegenerateConfiguration);
        }
        l /= n;
        for world in [lc.world_a, lc.world_b] {
            let w = t_world * Vector3::new(world.x, world.y, 1.0);
            let (xx, yy) = (w.x / w.z, w.y / w.z);
            a.row_mut(r).copy_from_slice(&[
                l.x * xx,
                l.x * yy,
                l.x,
                l.y * xx,
                l.y * yy,
                l.y,
                l.z * xx,
                l.z * yy,
                l.z,
            ]);
            r += 1;
        }
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap()
    });
    let smallest = order[0];
    let second = order.get(1).copied().unwrap_or(smallest);
    let largest = *order.last().unwrap();
    // Two vanishing singular values mean the solution is not unique.
    if svd.singular_values[largest] <= 0.0
        || svd.singular_values[second] <= 1e-10 * svd.singular_values[largest]
    {
        return Err(CalibError::DegenerateConfiguration);
    }
    let h_vec = v_t.row(smallest);
    let h_norm = Matrix3::new(
        h_vec[0], h_vec[1], h_vec[2], //
        h_vec[3], h_vec[4], h_vec[5], //
        h_vec[6], h_vec[7], h_vec[8],
    );

    let mut h = t_image
        .try_inverse()
        .ok_or(CalibError::DegenerateConfiguration)?
        * h_norm
        * t_world;
    h /= h.norm();

    // Fix the overall sign so projected points have positive w.
    let mut votes = 0i64;
    for (world, _) in pairs {
        let w = h * Vector3::new(world.x, world.y, 1.0);
        votes += if w.z >= 0.0 { 1 } else { -1 };
    }
    if votes < 0 || (pairs.is_empty() && h[(2, 2)] < 0.0) {
        h = -h;
    }
    Ok(h)
}

/// Hartley normalization: centroid to origin, mean distance to sqrt(2).
fn normalizing_similarity(points: impl Iterator<Item = Point2<f64>>) -> Matrix3<f64> {
    let pts: Vec<Point2<f64>> = points.collect();
    let n = pts.len().max(1) as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = pts
        .iter()
        .map(|p| ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt())
        .sum::<f64>()
        / n;
    let s = if mean_dist > 1e-12 {
        std::f64::consts::SQRT_2 / mean_dist
    } else {
        1.0
    };
    Matrix3::new(
        s, 0.0, -s * cx, //
        0.0, s, -s * cy, //
        0.0, 0.0, 1.0,
    )
}

/// Total-least-squares line through ≥ 2 pixel points, unit normal.
pub fn fit_image_line(points: &[Point2<f64>]) -> Option<Vector3<f64>> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - cx, p.y - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Normal = eigenvector of the smaller eigenvalue of the scatter matrix.
    let trace = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = (trace * trace / 4.0 - det).max(0.0).sqrt();
    let lambda_min = trace / 2.0 - disc;
    let (mut nx, mut ny) = if sxy.abs() > 1e-12 {
        (lambda_min - syy, sxy)
    } else if sxx <= syy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let norm = (nx * nx + ny * ny).sqrt();
    if norm < 1e-12 || trace < 1e-12 {
        return None;
    }
    nx /= norm;
    ny /= norm;
    Some(Vector3::new(nx, ny, -(nx * cx + ny * cy)))
}
