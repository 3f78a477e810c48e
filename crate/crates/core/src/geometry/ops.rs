use serde::{Deserialize, Serialize};

use super::body::convex_combination_feasible;
use super::gjk::{self, Mode};
use super::hull::convex_hull_2d;
use super::lp::{LinearProgram, LpStatus, FEASIBILITY_TOL};
use super::ConvexBody;
use crate::error::{Error, Result};
use crate::Vector;

/// Oriented hyperplane `⟨x, normal⟩ = offset`, `‖normal‖ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Half the width of a separating slab found by the solver (zero when
    /// the bodies touch); not necessarily the widest one.
    pub margin: f64,
}

fn check_same_dim(a: &ConvexBody, b: &ConvexBody) -> Result<()> {
    Error::check_dim(a.dim(), b.dim())
}

fn intersection_tol(a: &ConvexBody, b: &ConvexBody) -> f64 {
    1e-10 * (1.0 + a.origin_radius() + b.origin_radius())
}

fn difference_support<'a>(a: &'a ConvexBody, b: &'a ConvexBody) -> impl Fn(&Vector) -> Vector + 'a {
    move |d: &Vector| a.support_point(d) - b.support_point(&(-d))
}

/// `A ∩ B ≠ ∅`, decided by GJK on `A − B` to a relative tolerance of `1e-10`.
pub fn intersects(a: &ConvexBody, b: &ConvexBody) -> Result<bool> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let tol = intersection_tol(a, b);
    let start = a.support_point(&Vector::zeros(n)) - b.support_point(&Vector::zeros(n));
    let c = gjk::closest_to_origin(difference_support(a, b), &(-start), Mode::Intersect, tol);
    Ok(c.distance() <= tol)
}

/// Euclidean distance between two bodies (zero when they meet).
pub fn distance_between(a: &ConvexBody, b: &ConvexBody) -> Result<f64> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let c = gjk::closest_to_origin(difference_support(a, b), &Vector::zeros(n), Mode::Distance, 0.0);
    let d = c.distance();
    Ok(if d <= intersection_tol(a, b) { 0.0 } else { d })
}

/// Exact intersection of two H-polytopes; `None` when it is empty.
pub fn intersect_hrep(a: &ConvexBody, b: &ConvexBody) -> Result<Option<ConvexBody>> {
    check_same_dim(a, b)?;
    let (ConvexBody::HPolytope(ha), ConvexBody::HPolytope(hb)) = (a, b) else {
        return Err(Error::Unsupported(format!(
            "exact intersection needs two H-polytopes, got {} and {}",
            a.kind(),
            b.kind()
        )));
    };
    let halfspaces: Vec<_> = ha.halfspaces().iter().chain(hb.halfspaces()).cloned().collect();
    let mut lp = LinearProgram::free(a.dim());
    for h in &halfspaces {
        lp.le(h.normal.clone(), h.offset);
    }
    match lp.solve()? {
        LpStatus::Infeasible => Ok(None),
        _ => ConvexBody::hpolytope(a.dim(), halfspaces).map(Some),
    }
}

fn polytope_points(body: &ConvexBody) -> Result<&[Vector]> {
    body.vertices().ok_or_else(|| {
        Error::Unsupported(format!(
            "separation needs polytopes with known vertices, got {}",
            body.kind()
        ))
    })
}

fn centroid(points: &[Vector]) -> Vector {
    points.iter().fold(Vector::zeros(points[0].len()), |acc, p| acc + p) / points.len() as f64
}

/// A hyperplane properly separating `A` and `B` (`A` on the `≤` side), or
/// `None` when no such hyperplane exists.
///
/// Touching bodies are separable. The linear program maximizes the slab
/// half-width `δ` over `(u, α)` normalized by `⟨c_B − c_A, u⟩ = 1`, where
/// `c` are vertex centroids; any proper separator satisfies that
/// normalization after scaling. Both arguments must be polytopes.
pub fn separating_hyperplane(a: &ConvexBody, b: &ConvexBody) -> Result<Option<Hyperplane>> {
    check_same_dim(a, b)?;
    let pa = polytope_points(a)?;
    let pb = polytope_points(b)?;
    let n = a.dim();
    let ca = centroid(pa);
    let cb = centroid(pb);
    let dc = &cb - &ca;
    if dc.amax() <= 1e-14 * (1.0 + ca.amax()) {
        return Ok(None);
    }
    // Variables: u (n), α, δ.
    let mut lp = LinearProgram::free(n + 2);
    let mut obj = vec![0.0; n + 2];
    obj[n + 1] = 1.0;
    lp.maximize(obj);
    for p in pa {
        let mut row: Vec<f64> = p.iter().copied().collect();
        row.extend([-1.0, 1.0]);
        lp.le(row, 0.0);
    }
    for p in pb {
        let mut row: Vec<f64> = p.iter().map(|x| -x).collect();
        row.extend([1.0, 1.0]);
        lp.le(row, 0.0);
    }
    let mut norm_row: Vec<f64> = dc.iter().copied().collect();
    norm_row.extend([0.0, 0.0]);
    lp.eq(norm_row, 1.0);
    let mut cap = vec![0.0; n + 2];
    cap[n + 1] = 1.0;
    lp.le(cap, 1.0);
    let LpStatus::Optimal { x, .. } = lp.solve()? else {
        return Ok(None);
    };
    let u = Vector::from_row_slice(&x[..n]);
    let (alpha, delta) = (x[n], x[n + 1]);
    let scale = 1.0 + ca.amax().max(cb.amax());
    let un = u.norm();
    if delta < -FEASIBILITY_TOL * scale * un.max(1.0) || un == 0.0 {
        return Ok(None);
    }
    Ok(Some(Hyperplane {
        normal: (u / un).iter().copied().collect(),
        offset: alpha / un,
        margin: delta.max(0.0) / un,
    }))
}

/// `A + B` for two polytopes, as a V-polytope with redundant points removed.
pub fn minkowski_sum_vpolytopes(a: &ConvexBody, b: &ConvexBody) -> Result<ConvexBody> {
    check_same_dim(a, b)?;
    let pa = polytope_points(a)?;
    let pb = polytope_points(b)?;
    let sums: Vec<Vector> = pa.iter().flat_map(|p| pb.iter().map(move |q| p + q)).collect();
    let points = match a.dim() {
        1 => {
            let lo = sums.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = sums.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            vec![Vector::from_vec(vec![lo]), Vector::from_vec(vec![hi])]
        }
        2 => convex_hull_2d(&sums),
        _ => prune_interior(sums),
    };
    ConvexBody::vpolytope(points)
}

/// Drops points that are convex combinations of the remaining ones.
fn prune_interior(mut points: Vec<Vector>) -> Vec<Vector> {
    let mut i = 0;
    while i < points.len() && points.len() > 1 {
        let p = points.swap_remove(i);
        if convex_combination_feasible(&points, &p) {
            continue;
        }
        points.push(p);
        let last = points.len() - 1;
        points.swap(i, last);
        i += 1;
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    fn square(lo: f64, hi: f64) -> ConvexBody {
        ConvexBody::polygon(&[(lo, lo), (hi, lo), (hi, hi), (lo, hi)]).unwrap()
    }

    #[test]
    fn ball_pairs() {
        let a = ConvexBody::unit_ball(2);
        let far = ConvexBody::ball(v(&[3.0, 0.0]), 1.0).unwrap();
        let touch = ConvexBody::ball(v(&[2.0, 0.0]), 1.0).unwrap();
        assert!(!intersects(&a, &far).unwrap());
        assert!(intersects(&a, &touch).unwrap());
        assert!((distance_between(&a, &far).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(
            intersects(&a, &ConvexBody::unit_ball(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hrep_intersection() {
        let a = HPolytope::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let b = HPolytope::cuboid(&[1.0, 1.0], &[3.0, 3.0]).unwrap();
        let c = intersect_hrep(&a, &b).unwrap().unwrap();
        assert!((c.exact_volume().unwrap() - 1.0).abs() < 1e-12);
        let far = HPolytope::cuboid(&[5.0, 5.0], &[6.0, 6.0]).unwrap();
        assert!(intersect_hrep(&a, &far).unwrap().is_none());
    }

    #[test]
    fn separation_of_squares() {
        let a = square(0.0, 1.0);
        let b = square(2.0, 3.0);
        let h = separating_hyperplane(&a, &b).unwrap().unwrap();
        let u = v(&h.normal);
        for p in a.vertices().unwrap() {
            assert!(p.dot(&u) <= h.offset + 1e-9);
        }
        for p in b.vertices().unwrap() {
            assert!(p.dot(&u) >= h.offset - 1e-9);
        }
        assert!(h.margin > 0.1);

        let touching = square(1.0, 2.0);
        let h = separating_hyperplane(&a, &touching).unwrap().unwrap();
        assert!(h.margin.abs() < 1e-9);

        let overlapping = square(0.5, 1.5);
        assert!(separating_hyperplane(&a, &overlapping).unwrap().is_none());
        assert!(separating_hyperplane(&a, &ConvexBody::unit_ball(2)).is_err());
    }

    #[test]
    fn minkowski_sums() {
        let a = square(0.0, 1.0);
        let tri = ConvexBody::polygon(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        let s = minkowski_sum_vpolytopes(&a, &tri).unwrap();
        assert_eq!(s.vertices().unwrap().len(), 5);
        assert!((s.exact_volume().unwrap() - 3.5).abs() < 1e-12);

        let c3 = HPolytope::cuboid(&[0.0; 3], &[1.0; 3]).unwrap();
        let s3 = minkowski_sum_vpolytopes(&c3, &c3).unwrap();
        assert_eq!(s3.vertices().unwrap().len(), 8);
        assert!(s3.contains(&v(&[1.9, 1.9, 0.1])).unwrap());
    }
}
