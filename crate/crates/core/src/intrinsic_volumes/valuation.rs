use std::fmt;
use std::sync::Arc;

use super::{intrinsic_volumes_closed, steiner::volume_mc};
use crate::error::{Error, Result};
use crate::geometry::{intersects, ConvexBody};
use crate::sampling::{AffineFlat, McPlan, Stream};

/// The set a valuation is evaluated on.
#[derive(Clone, Copy, Debug)]
pub enum Section<'a> {
    Empty,
    Body(&'a ConvexBody),
    /// `A ∩ B`, given by its two factors.
    Pair(&'a ConvexBody, &'a ConvexBody),
    /// `K ∩ E` for an affine flat `E`.
    Flat(&'a ConvexBody, &'a AffineFlat),
}

/// User-supplied evaluator.
pub type CustomFn = dyn Fn(&Section<'_>, &mut Stream) -> Result<f64> + Send + Sync;

#[derive(Clone)]
pub enum ValuationKind {
    /// `χ`: 1 on nonempty sets.
    Euler,
    /// `Vₙ`; intersections are measured hit-or-miss with `inner_samples`
    /// points in the bounding box of the pair.
    Volume { inner_samples: u32 },
    /// `Vⱼ` from closed forms (balls, ellipsoids, boxes).
    Intrinsic(usize),
    Custom(Arc<CustomFn>),
}

impl fmt::Debug for ValuationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euler => write!(f, "Euler"),
            Self::Volume { inner_samples } => write!(f, "Volume {{ inner_samples: {inner_samples} }}"),
            Self::Intrinsic(j) => write!(f, "Intrinsic({j})"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A functional on convex bodies, with its homogeneity degree when known.
#[derive(Clone, Debug)]
pub struct Valuation {
    pub name: String,
    pub degree: Option<usize>,
    pub kind: ValuationKind,
}

pub const DEFAULT_INNER_SAMPLES: u32 = 256;

impl Valuation {
    pub fn euler() -> Self {
        Self {
            name: "chi".into(),
            degree: Some(0),
            kind: ValuationKind::Euler,
        }
    }

    /// `Vₙ` in ambient dimension `n`.
    pub fn volume(n: usize) -> Self {
        Self::volume_with_inner(n, DEFAULT_INNER_SAMPLES)
    }

    pub fn volume_with_inner(n: usize, inner_samples: u32) -> Self {
        Self {
            name: "vn".into(),
            degree: Some(n),
            kind: ValuationKind::Volume {
                inner_samples: inner_samples.max(1),
            },
        }
    }

    pub fn intrinsic(j: usize) -> Self {
        Self {
            name: format!("v{j}"),
            degree: Some(j),
            kind: ValuationKind::Intrinsic(j),
        }
    }

    pub fn custom(name: impl Into<String>, degree: Option<usize>, f: Arc<CustomFn>) -> Self {
        Self {
            name: name.into(),
            degree,
            kind: ValuationKind::Custom(f),
        }
    }

    pub fn is_euler(&self) -> bool {
        matches!(self.kind, ValuationKind::Euler)
    }

    pub fn is_volume(&self) -> bool {
        matches!(self.kind, ValuationKind::Volume { .. })
    }

    /// `φ(section)`. Randomized evaluators (the nested volume estimate)
    /// draw from `rng`; the rest ignore it.
    pub fn evaluate(&self, section: &Section<'_>, rng: &mut Stream) -> Result<f64> {
        if let ValuationKind::Custom(f) = &self.kind {
            return f(section, rng);
        }
        match (section, &self.kind) {
            (Section::Empty, _) => Ok(0.0),
            (Section::Body(_), ValuationKind::Euler) => Ok(1.0),
            (Section::Pair(a, b), ValuationKind::Euler) => Ok(f64::from(u8::from(intersects(a, b)?))),
            (Section::Flat(k, e), ValuationKind::Euler) => Ok(f64::from(u8::from(e.hits(k)?))),
            (Section::Body(k), ValuationKind::Volume { inner_samples }) => Ok(match k.exact_volume() {
                Some(v) => v,
                None => {
                    let plan = McPlan::new(u64::from(*inner_samples), rand::Rng::random(rng)).with_shards(1);
                    volume_mc(k, &plan).mean
                }
            }),
            (Section::Pair(a, b), ValuationKind::Volume { inner_samples }) => {
                pair_volume(a, b, *inner_samples, rng)
            }
            (Section::Flat(k, e), ValuationKind::Volume { .. }) => {
                if e.flat_dim() < e.ambient_dim() {
                    Ok(0.0)
                } else {
                    self.evaluate(&Section::Body(k), rng)
                }
            }
            (Section::Body(k), ValuationKind::Intrinsic(j)) => {
                let all = intrinsic_volumes_closed(k).ok_or_else(|| {
                    Error::Unsupported(format!("no closed-form intrinsic volumes for a {}", k.kind()))
                })?;
                all.get(*j)
                    .copied()
                    .ok_or_else(|| Error::OutOfRange(format!("j = {j} exceeds the dimension {}", k.dim())))
            }
            (_, ValuationKind::Intrinsic(j)) => Err(Error::Unsupported(format!(
                "V_{j} of an intersection has no closed form; use a custom valuation"
            ))),
            (_, ValuationKind::Custom(_)) => unreachable!("handled above"),
        }
    }

    /// `φ(K)` for a single body.
    pub fn evaluate_body(&self, body: &ConvexBody, rng: &mut Stream) -> Result<f64> {
        self.evaluate(&Section::Body(body), rng)
    }
}

/// Unbiased hit-or-miss estimate of `Vₙ(A ∩ B)` in the intersection of the
/// two bounding boxes.
fn pair_volume(a: &ConvexBody, b: &ConvexBody, inner: u32, rng: &mut Stream) -> Result<f64> {
    Error::check_dim(a.dim(), b.dim())?;
    let Some(bbox) = a.bounding_box().intersect(&b.bounding_box()) else {
        return Ok(0.0);
    };
    let vol = bbox.volume();
    if vol == 0.0 {
        return Ok(0.0);
    }
    let mut hits = 0u32;
    for _ in 0..inner {
        let x = bbox.sample(rng);
        if a.contains_point(&x) && b.contains_point(&x) {
            hits += 1;
        }
    }
    Ok(vol * f64::from(hits) / f64::from(inner))
}

/// Diagnostic lower estimate of `‖φ‖ = sup_{K ⊆ Bⁿ} |φ(K)|` over the members
/// of `family` that lie in the unit ball.
pub fn norm_estimate(phi: &Valuation, family: &[ConvexBody], rng: &mut Stream) -> Result<f64> {
    let mut best: f64 = 0.0;
    for k in family.iter().filter(|k| k.origin_radius() <= 1.0 + 1e-12) {
        best = best.max(phi.evaluate_body(k, rng)?.abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;
    use crate::sampling::shard_stream;
    use crate::Vector;

    #[test]
    fn empty_marker_evaluates_to_zero() {
        let mut rng = shard_stream(0, 0);
        for phi in [Valuation::euler(), Valuation::volume(2), Valuation::intrinsic(1)] {
            assert_eq!(phi.evaluate(&Section::Empty, &mut rng).unwrap(), 0.0);
        }
    }

    #[test]
    fn homogeneity_on_test_bodies() {
        let mut rng = shard_stream(0, 0);
        let bodies = [
            ConvexBody::axis_ellipsoid(Vector::from_vec(vec![0.1, 0.2, 0.0]), &[1.5, 0.7, 0.4]).unwrap(),
            HPolytope::cuboid(&[0.0, 0.0, 0.0], &[1.0, 2.0, 0.5]).unwrap(),
        ];
        for j in 0..=3 {
            let phi = Valuation::intrinsic(j);
            for k in &bodies {
                let base = phi.evaluate_body(k, &mut rng).unwrap();
                let scaled = phi.evaluate_body(&k.scale(1.7).unwrap(), &mut rng).unwrap();
                let want = 1.7f64.powi(phi.degree.unwrap() as i32) * base;
                assert!((scaled - want).abs() <= 1e-6 * want.abs(), "j={j} {scaled} {want}");
            }
        }
    }

    #[test]
    fn pair_volume_is_unbiased() {
        let a = HPolytope::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let b = HPolytope::cuboid(&[1.0, 1.0], &[3.0, 3.0]).unwrap();
        let phi = Valuation::volume(2);
        let stats = McPlan::new(20_000, 3).run(|rng| phi.evaluate(&Section::Pair(&a, &b), rng).unwrap());
        // The intersection fills its bounding box exactly.
        assert!((stats.mean() - 1.0).abs() < 1e-12);
        let c = ConvexBody::unit_ball(2);
        let d = ConvexBody::ball(Vector::from_vec(vec![1.0, 0.0]), 1.0).unwrap();
        let lens = 2.0 * std::f64::consts::PI / 3.0 - 3f64.sqrt() / 2.0;
        let stats = McPlan::new(20_000, 4).run(|rng| phi.evaluate(&Section::Pair(&c, &d), rng).unwrap());
        assert!((stats.mean() - lens).abs() < 3.0 * stats.std_error());
    }

    #[test]
    fn norm_diagnostic() {
        let mut rng = shard_stream(0, 0);
        let family = [
            ConvexBody::unit_ball(2),
            HPolytope::cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap(),
            ConvexBody::ball(Vector::from_vec(vec![3.0, 0.0]), 1.0).unwrap(),
        ];
        let v1 = norm_estimate(&Valuation::intrinsic(1), &family, &mut rng).unwrap();
        assert!((v1 - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(norm_estimate(&Valuation::euler(), &family, &mut rng).unwrap(), 1.0);
    }
}
