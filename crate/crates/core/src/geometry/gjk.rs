//! Minimum-norm point of a convex set given only its support map
//! (Gilbert–Johnson–Keerthi). The sub-simplex step enumerates faces, which
//! is cheap for the ambient dimensions used here (at most 7 points).

use crate::Vector;

const MAX_ITERATIONS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Converge to the true distance.
    Distance,
    /// Stop as soon as the distance is known to be above or below `tol`.
    Intersect,
}

/// Result of a GJK run on `C`.
#[derive(Clone, Debug)]
pub(crate) struct Closest {
    /// Closest point of `C` to the origin (an upper-bound witness).
    pub point: Vector,
}

impl Closest {
    pub fn distance(&self) -> f64 {
        self.point.norm()
    }
}

/// Runs GJK on the convex set with support map `support`.
///
/// `tol` is the absolute distance tolerance: in [`Mode::Intersect`] the
/// loop stops once the distance is proven `≤ tol` or `> tol`.
pub(crate) fn closest_to_origin<S>(support: S, start: &Vector, mode: Mode, tol: f64) -> Closest
where
    S: Fn(&Vector) -> Vector,
{
    let dim = start.len();
    let first = if start.norm() == 0.0 { support(&unit(dim)) } else { support(start) };
    let mut simplex: Vec<Vector> = vec![first];
    let mut v = simplex[0].clone();
    let mut lower = 0.0_f64;

    for _ in 0..MAX_ITERATIONS {
        let vn = v.norm();
        if vn <= tol {
            return Closest { point: v };
        }
        let w = support(&(-&v));
        lower = lower.max(v.dot(&w) / vn);
        if mode == Mode::Intersect && lower > tol {
            break;
        }
        if vn - lower <= 1e-12 * (1.0 + vn) {
            break;
        }
        if simplex.iter().any(|p| (p - &w).norm() <= 1e-14 * (1.0 + vn)) {
            break;
        }
        simplex.push(w);
        let (p, kept) = min_norm_in_hull(&simplex);
        simplex = kept;
        if p.norm() >= vn {
            // No progress: numerical floor reached.
            break;
        }
        v = p;
    }
    Closest { point: v }
}

fn unit(dim: usize) -> Vector {
    let mut e = Vector::zeros(dim);
    if dim > 0 {
        e[0] = 1.0;
    }
    e
}

/// Minimum-norm point in the convex hull of `points` and the subset of
/// points carrying positive weight.
fn min_norm_in_hull(points: &[Vector]) -> (Vector, Vec<Vector>) {
    let k = points.len();
    let mut best: Option<(f64, Vector, u32)> = None;
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let Some((point, weights)) = affine_min_norm(points, &idx) else {
            continue;
        };
        if weights.iter().any(|&w| w < -1e-12) {
            continue;
        }
        let norm = point.norm();
        let better = match &best {
            None => true,
            Some((bn, _, bm)) => {
                norm < bn - 1e-15 || (norm <= bn + 1e-15 && mask.count_ones() < bm.count_ones())
            }
        };
        if better {
            best = Some((norm, point, mask));
        }
    }
    let (_, point, mask) = best.expect("singletons are always valid");
    let kept = (0..k)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| points[i].clone())
        .collect();
    (point, kept)
}

/// Minimum-norm point of the affine hull of `points[idx]` with its
/// barycentric weights; `None` when the points are affinely dependent.
fn affine_min_norm(points: &[Vector], idx: &[usize]) -> Option<(Vector, Vec<f64>)> {
    let p0 = &points[idx[0]];
    if idx.len() == 1 {
        return Some((p0.clone(), vec![1.0]));
    }
    let s = idx.len() - 1;
    let dim = p0.len();
    if s > dim {
        return None;
    }
    let d = crate::Matrix::from_fn(dim, s, |r, c| points[idx[c + 1]][r] - p0[r]);
    let gram = d.transpose() * &d;
    let scale = gram.diagonal().amax();
    if scale == 0.0 {
        return None;
    }
    let chol = gram.clone().cholesky()?;
    // Reject near-degenerate faces; Cholesky alone is too permissive.
    let min_pivot = (0..s).map(|i| chol.l()[(i, i)].powi(2)).fold(f64::INFINITY, f64::min);
    if min_pivot <= 1e-13 * scale {
        return None;
    }
    let mu = chol.solve(&(-(d.transpose() * p0)));
    let point = p0 + &d * &mu;
    let mut weights = Vec::with_capacity(idx.len());
    weights.push(1.0 - mu.sum());
    weights.extend(mu.iter());
    Some((point, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball_support(center: Vector, r: f64) -> impl Fn(&Vector) -> Vector {
        move |d: &Vector| {
            let n = d.norm();
            if n == 0.0 {
                center.clone()
            } else {
                &center + d * (r / n)
            }
        }
    }

    #[test]
    fn distance_to_offset_ball() {
        let s = ball_support(Vector::from_vec(vec![3.0, 4.0]), 1.0);
        let c = closest_to_origin(s, &Vector::from_vec(vec![1.0, 0.0]), Mode::Distance, 1e-12);
        assert!((c.distance() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn square_contains_origin() {
        let verts: Vec<Vector> = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(x, y)| Vector::from_vec(vec![x, y]))
            .collect();
        let s = |d: &Vector| {
            verts
                .iter()
                .max_by(|a, b| a.dot(d).total_cmp(&b.dot(d)))
                .unwrap()
                .clone()
        };
        let c = closest_to_origin(s, &Vector::from_vec(vec![0.3, 0.2]), Mode::Distance, 1e-12);
        assert!(c.distance() <= 1e-12);
    }

    #[test]
    fn polytope_distance_is_exact() {
        // Triangle (2,0),(3,0),(2,5): closest point is (2,0).
        let verts: Vec<Vector> = [(2.0, 0.0), (3.0, 0.0), (2.0, 5.0)]
            .iter()
            .map(|&(x, y)| Vector::from_vec(vec![x, y]))
            .collect();
        let s = |d: &Vector| {
            verts
                .iter()
                .max_by(|a, b| a.dot(d).total_cmp(&b.dot(d)))
                .unwrap()
                .clone()
        };
        let c = closest_to_origin(s, &Vector::from_vec(vec![1.0, 1.0]), Mode::Distance, 0.0);
        assert!((c.distance() - 2.0).abs() < 1e-12);
    }
}
