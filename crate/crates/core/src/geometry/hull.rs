//! Planar convex hulls and polygon helpers.

use crate::Vector;

fn cross(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns the strictly convex hull in
/// counter-clockwise order; collinear and duplicate points are dropped.
pub fn convex_hull_2d(points: &[Vector]) -> Vec<Vector> {
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (&*a - &*b).norm() <= 1e-14 * (1.0 + b.norm()));
    if pts.len() <= 2 {
        return pts;
    }
    let scale = pts.iter().map(|p| p.amax()).fold(1.0_f64, f64::max);
    let eps = 1e-13 * scale * scale;
    let mut lower: Vec<Vector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area of a counter-clockwise polygon.
pub fn polygon_area(hull: &[Vector]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..hull.len() {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Signed distance from `p` to the boundary of a strictly convex
/// counter-clockwise polygon: negative inside, positive outside.
pub fn signed_boundary_distance(hull: &[Vector], p: &Vector) -> f64 {
    let k = hull.len();
    let mut inside = k >= 3;
    let mut dist = f64::INFINITY;
    for i in 0..k {
        let a = &hull[i];
        let b = &hull[(i + 1) % k];
        dist = dist.min(segment_distance(a, b, p));
        if k >= 3 {
            let edge = b - a;
            let side = edge[0] * (p[1] - a[1]) - edge[1] * (p[0] - a[0]);
            if side < 0.0 {
                inside = false;
            }
        }
    }
    if k == 1 {
        dist = (p - &hull[0]).norm();
    }
    if inside {
        -dist
    } else {
        dist
    }
}

fn segment_distance(a: &Vector, b: &Vector, p: &Vector) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    };
    (p - (a + ab * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vector {
        Vector::from_vec(vec![x, y])
    }

    #[test]
    fn hull_of_square_with_interior_and_collinear_points() {
        let pts = vec![
            v(0.0, 0.0),
            v(1.0, 0.0),
            v(0.5, 0.0),
            v(1.0, 1.0),
            v(0.0, 1.0),
            v(0.5, 0.5),
            v(1.0, 1.0),
        ];
        let h = convex_hull_2d(&pts);
        assert_eq!(h.len(), 4);
        assert!((polygon_area(&h) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn signed_distance_inside_outside() {
        let h = convex_hull_2d(&[v(0.0, 0.0), v(2.0, 0.0), v(2.0, 2.0), v(0.0, 2.0)]);
        assert!((signed_boundary_distance(&h, &v(1.0, 1.0)) + 1.0).abs() < 1e-15);
        assert!((signed_boundary_distance(&h, &v(3.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!(signed_boundary_distance(&h, &v(2.0, 0.5)).abs() < 1e-15);
    }
}
