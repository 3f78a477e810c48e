//! Intrinsic volumes `V₀, …, V_n`: closed forms for balls, boxes and
//! ellipsoids, Monte Carlo volume, and the Steiner-polynomial estimator.
//!
//! Normalization: `V₀ = χ = 1` on nonempty bodies, `V_n` is volume and
//! `V_{n−1}` is half the surface area.

mod ellipsoid;
mod quadrature;
mod steiner;
mod valuation;

pub use ellipsoid::{elementary_symmetric, intrinsic_volume_ellipsoid, intrinsic_volumes_ellipsoid};
pub use quadrature::integrate;
pub use steiner::{steiner_fit, volume_mc, SteinerFit};
pub use valuation::{norm_estimate, Section, Valuation, ValuationKind, DEFAULT_INNER_SAMPLES};

use crate::error::{Error, Result};
use crate::geometry::hull::{convex_hull_2d, polygon_area};
use crate::geometry::ConvexBody;

/// `κⱼ`, the volume of the unit ball in `ℝʲ`.
pub fn kappa(j: usize) -> f64 {
    crate::geometry::unit_ball_volume(j)
}

fn check_degree(n: usize, j: usize) -> Result<()> {
    if j > n {
        Err(Error::OutOfRange(format!("j = {j} exceeds the dimension {n}")))
    } else {
        Ok(())
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Vⱼ(r·Bⁿ) = C(n, j) κₙ/κₙ₋ⱼ · rʲ`.
pub fn intrinsic_volume_ball(n: usize, j: usize, radius: f64) -> Result<f64> {
    check_degree(n, j)?;
    if !(radius >= 0.0) {
        return Err(Error::OutOfRange(format!("radius {radius} must be nonnegative")));
    }
    Ok(binomial(n, j) * kappa(n) / kappa(n - j) * radius.powi(j as i32))
}

/// `Vⱼ([0, side]ⁿ) = C(n, j) sideʲ`.
pub fn intrinsic_volume_cube(n: usize, j: usize, side: f64) -> Result<f64> {
    check_degree(n, j)?;
    Ok(binomial(n, j) * side.powi(j as i32))
}

/// `Vⱼ` of a box with the given side lengths: the `j`-th elementary
/// symmetric polynomial of the sides.
pub fn intrinsic_volume_box(sides: &[f64], j: usize) -> Result<f64> {
    check_degree(sides.len(), j)?;
    Ok(elementary_symmetric(sides, j)[j])
}

/// `χ`: 1 on a nonempty convex body, 0 on the empty set.
pub fn euler_characteristic(body: Option<&ConvexBody>) -> f64 {
    if body.is_some() {
        1.0
    } else {
        0.0
    }
}

/// All closed-form intrinsic volumes of a body, when its type has them
/// (balls, ellipsoids, axis-aligned boxes, and polytopes of dimension at
/// most 2).
pub fn intrinsic_volumes_closed(body: &ConvexBody) -> Option<Vec<f64>> {
    let n = body.dim();
    match body {
        ConvexBody::Ball(b) => Some(
            (0..=n)
                .map(|j| intrinsic_volume_ball(n, j, b.radius()).expect("j ≤ n"))
                .collect(),
        ),
        ConvexBody::Ellipsoid(e) => intrinsic_volumes_ellipsoid(e.semiaxes().as_slice()).ok(),
        _ => match axis_aligned_box_sides(body) {
            Some(sides) => Some((0..=n).map(|j| elementary_symmetric(&sides, j)[j]).collect()),
            None => low_dimensional_polytope(body),
        },
    }
}

/// `[1, half perimeter, area]` of a polygon, `[1, length]` of a segment.
fn low_dimensional_polytope(body: &ConvexBody) -> Option<Vec<f64>> {
    let vertices = body.vertices()?;
    match body.dim() {
        1 => {
            let b = body.bounding_box();
            Some(vec![1.0, b.upper[0] - b.lower[0]])
        }
        2 => {
            let hull = convex_hull_2d(vertices);
            let perimeter: f64 = (0..hull.len())
                .map(|i| (&hull[(i + 1) % hull.len()] - &hull[i]).norm())
                .sum();
            Some(vec![1.0, perimeter / 2.0, polygon_area(&hull)])
        }
        _ => None,
    }
}

/// Side lengths if the body is a polytope equal to its bounding box.
fn axis_aligned_box_sides(body: &ConvexBody) -> Option<Vec<f64>> {
    let vertices = body.vertices()?;
    let b = body.bounding_box();
    let on_corner = |p: &crate::Vector| {
        (0..b.dim()).all(|i| {
            let scale = 1e-12 * (1.0 + b.lower[i].abs().max(b.upper[i].abs()));
            (p[i] - b.lower[i]).abs() <= scale || (p[i] - b.upper[i]).abs() <= scale
        })
    };
    let sides: Vec<f64> = b.lower.iter().zip(&b.upper).map(|(l, u)| u - l).collect();
    let full = sides.iter().all(|s| *s > 0.0);
    let expected = 1usize << b.dim();
    (full && vertices.len() == expected && vertices.iter().all(on_corner)).then_some(sides)
}
