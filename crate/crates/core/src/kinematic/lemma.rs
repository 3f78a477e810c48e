//! Boundary characterization of touching positions: for `ḡ = t ∘ g`,
//! `M ∩ ḡL` is nonempty and `M`, `ḡL` are separated by a hyperplane exactly
//! when `t ∈ ∂(M − gL)`. Checked for planar polygons.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::hull::signed_boundary_distance;
use crate::geometry::{intersects, minkowski_sum_vpolytopes, separating_hyperplane, ConvexBody};
use crate::matrix_group::Component;
use crate::sampling::group::LinearDraw;
use crate::sampling::{McPlan, Stream};
use crate::Vector;

/// Points of the interior and exterior strata this close to `∂(M − gL)`
/// are not classified.
pub const BOUNDARY_BAND: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumCounts {
    pub agreements: u64,
    pub disagreements: u64,
    pub boundary_skips: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub trials: u64,
    pub agreements: u64,
    pub disagreements: u64,
    pub boundary_skips: u64,
    pub interior: StratumCounts,
    pub boundary: StratumCounts,
    pub exterior: StratumCounts,
}

enum Outcome {
    Agree,
    Disagree,
    Skip,
}

fn require_polygon(body: &ConvexBody, name: &str) -> Result<()> {
    if body.dim() != 2 || body.vertices().is_none() {
        return Err(Error::Unsupported(format!(
            "{name} must be a planar polytope, got a {} in dimension {}",
            body.kind(),
            body.dim()
        )));
    }
    Ok(())
}

fn point_on_boundary(hull: &[Vector], rng: &mut Stream) -> Vector {
    let i = rng.random_range(0..hull.len());
    let a = &hull[i];
    let b = &hull[(i + 1) % hull.len()];
    a + (b - a) * rng.random::<f64>()
}

fn one_trial(m: &ConvexBody, l: &ConvexBody, stratum: Stratum, rng: &mut Stream) -> Result<Outcome> {
    let g = LinearDraw::sample(2, Component::Full, true, rng)?;
    let gl = g.image(l)?;
    let diff = minkowski_sum_vpolytopes(m, &gl.reflect()?)?;
    let ConvexBody::VPolytope(d) = &diff else {
        unreachable!("Minkowski sums are V-polytopes")
    };
    let hull = d.hull_2d().expect("planar").to_vec();
    if hull.len() < 3 {
        return Ok(Outcome::Skip);
    }
    let center = hull.iter().fold(Vector::zeros(2), |acc, p| acc + p) / hull.len() as f64;
    let p = point_on_boundary(&hull, rng);
    let t = match stratum {
        Stratum::Boundary => p,
        Stratum::Interior => &center + (&p - &center) * rng.random_range(0.0..0.9),
        Stratum::Exterior => &center + (&p - &center) * rng.random_range(1.1..3.0),
    };
    if stratum != Stratum::Boundary && signed_boundary_distance(&hull, &t).abs() < BOUNDARY_BAND {
        return Ok(Outcome::Skip);
    }
    let moved = gl.translate(&t)?;
    let lhs = intersects(m, &moved)? && separating_hyperplane(m, &moved)?.is_some();
    let rhs = stratum == Stratum::Boundary;
    Ok(if lhs == rhs { Outcome::Agree } else { Outcome::Disagree })
}

fn stratum_for(rng: &mut Stream) -> Stratum {
    match rng.random_range(0..3) {
        0 => Stratum::Interior,
        1 => Stratum::Boundary,
        _ => Stratum::Exterior,
    }
}

fn tally(results: Vec<(Stratum, Outcome)>) -> LemmaReport {
    let mut r = LemmaReport {
        trials: results.len() as u64,
        agreements: 0,
        disagreements: 0,
        boundary_skips: 0,
        interior: StratumCounts::default(),
        boundary: StratumCounts::default(),
        exterior: StratumCounts::default(),
    };
    for (s, o) in results {
        let c = match s {
            Stratum::Interior => &mut r.interior,
            Stratum::Boundary => &mut r.boundary,
            Stratum::Exterior => &mut r.exterior,
        };
        match o {
            Outcome::Agree => {
                c.agreements += 1;
                r.agreements += 1;
            }
            Outcome::Disagree => {
                c.disagreements += 1;
                r.disagreements += 1;
            }
            Outcome::Skip => {
                c.boundary_skips += 1;
                r.boundary_skips += 1;
            }
        }
    }
    r
}

/// Checks the biconditional on `plan.samples` trials with random
/// `g = k e^X` and `t` from a random stratum of `M − gL`.
pub fn separation_lemma_check(m: &ConvexBody, l: &ConvexBody, plan: &McPlan) -> Result<LemmaReport> {
    require_polygon(m, "M")?;
    require_polygon(l, "L")?;
    let results = plan.try_collect(|rng| {
        let s = stratum_for(rng);
        Ok((s, one_trial(m, l, s, rng)?))
    })?;
    Ok(tally(results))
}

/// Random convex polygon: hull of 3 to 8 uniform points in `[−1, 1]²`.
pub fn random_polygon(rng: &mut Stream) -> Result<ConvexBody> {
    loop {
        let k = rng.random_range(3..=8);
        let pts: Vec<Vector> = (0..k)
            .map(|_| Vector::from_vec(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]))
            .collect();
        let body = ConvexBody::vpolytope(pts)?;
        if body.exact_volume().unwrap_or(0.0) > 1e-3 {
            return Ok(body);
        }
    }
}

/// As [`separation_lemma_check`] with a fresh random polygon pair per trial.
pub fn separation_lemma_check_random(plan: &McPlan) -> Result<LemmaReport> {
    let results = plan.try_collect(|rng| {
        let m = random_polygon(rng)?;
        let l = random_polygon(rng)?;
        let s = stratum_for(rng);
        Ok((s, one_trial(&m, &l, s, rng)?))
    })?;
    Ok(tally(results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_agree_on_every_stratum() {
        let sq = ConvexBody::polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let r = separation_lemma_check(&sq, &sq, &McPlan::new(300, 5)).unwrap();
        assert_eq!(r.disagreements, 0, "{r:?}");
        assert_eq!(r.agreements + r.boundary_skips, 300);
        assert!(r.interior.agreements > 0 && r.boundary.agreements > 0 && r.exterior.agreements > 0);
    }

    #[test]
    fn non_polygons_are_rejected() {
        let b = ConvexBody::unit_ball(2);
        assert!(separation_lemma_check(&b, &b, &McPlan::new(1, 0)).is_err());
    }
}
