//! Convex bodies in ℝⁿ and the predicates downstream estimators need.
//!
//! Every body is immutable once constructed and every operation is a pure
//! function, so bodies can be shared freely across sampling threads.

mod affine;
mod body;
pub(crate) mod gjk;
pub mod hull;
pub mod lp;
mod ops;
mod spec;

pub use affine::AffineMap;
pub use body::{Ball, ConvexBody, Diameter, Ellipsoid, HPolytope, Halfspace, VPolytope};
pub use ops::{
    distance_between, intersect_hrep, intersects, minkowski_sum_vpolytopes, separating_hyperplane,
    Hyperplane,
};
pub use spec::BodySpec;
pub(crate) use body::unit_ball_volume;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::Vector;

/// Axis-aligned box `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).max(0.0))
            .product()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    pub fn intersect(&self, other: &BoxRegion) -> Option<BoxRegion> {
        let lower: Vec<f64> = self.lower.iter().zip(&other.lower).map(|(a, b)| a.max(*b)).collect();
        let upper: Vec<f64> = self.upper.iter().zip(&other.upper).map(|(a, b)| a.min(*b)).collect();
        lower
            .iter()
            .zip(&upper)
            .all(|(l, u)| l <= u)
            .then_some(BoxRegion { lower, upper })
    }

    /// Uniform point in the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| l + (u - l) * rng.random::<f64>()),
        )
    }

    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}
