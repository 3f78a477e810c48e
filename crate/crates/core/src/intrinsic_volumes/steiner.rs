use serde::{Deserialize, Serialize};

use super::kappa;
use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, ConvexBody};
use crate::sampling::{EstimatorResult, McPlan};
use crate::{Matrix, Vector};

/// Largest acceptable condition number of the weighted design matrix.
const MAX_CONDITION: f64 = 1e12;

/// Hit-or-miss volume: the hit fraction in the bounding box times the box
/// volume.
pub fn volume_mc(body: &ConvexBody, plan: &McPlan) -> EstimatorResult {
    let bbox = body.bounding_box();
    hit_or_miss(&bbox, plan, |x| body.contains_point(x))
}

fn hit_or_miss(bbox: &BoxRegion, plan: &McPlan, inside: impl Fn(&Vector) -> bool + Sync) -> EstimatorResult {
    let vol = bbox.volume();
    let stats = plan.run(|rng| {
        let x = bbox.sample(rng);
        if inside(&x) {
            vol
        } else {
            0.0
        }
    });
    EstimatorResult::from_stats(&stats, plan.seed, vol)
}

/// Generalized least-squares fit of Steiner's polynomial
/// `Vₙ(M + εBⁿ) = Σⱼ εⁿ⁻ʲ κₙ₋ⱼ Vⱼ(M)` to hit-or-miss volumes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerFit {
    pub epsilons: Vec<f64>,
    /// Marginal volume estimates, one per epsilon.
    pub volumes: Vec<EstimatorResult>,
    /// `κₙ₋ⱼ Vⱼ(M)`, indexed by `j`.
    pub coefficients: Vec<f64>,
    /// `Vⱼ(M)`, indexed by `j`.
    pub intrinsic_volumes: Vec<f64>,
    /// Standard errors of `intrinsic_volumes` from the fit covariance.
    pub std_errors: Vec<f64>,
    /// Generalized residual sum of squares per degree of freedom (`NaN`
    /// when the fit is exactly determined).
    pub residual: f64,
}

/// Reweighting passes of the covariance model.
const GLS_PASSES: usize = 3;

/// Fits the Steiner polynomial of `body`.
///
/// All `plan.samples` points are drawn once, uniformly in the bounding box
/// of `M + ε_max Bⁿ`, and each point's distance to `M` is shared by every
/// epsilon. The estimates are therefore correlated with known covariance
/// `|B|²(p_min(i,k) − pᵢpₖ)/N`, which the fit uses with `pᵢ` taken from the
/// previous pass's fitted polynomial (the first pass uses the raw hit
/// fractions), so the weights do not depend on the noise they weight.
pub fn steiner_fit(body: &ConvexBody, epsilons: &[f64], plan: &McPlan) -> Result<SteinerFit> {
    let n = body.dim();
    if let Some(bad) = epsilons.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::OutOfRange(format!("epsilon {bad} must be positive")));
    }
    let mut distinct = epsilons.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < n + 1 {
        return Err(Error::RankDeficient(f64::INFINITY));
    }
    if plan.samples == 0 {
        return Err(Error::OutOfRange("sample count must be positive".into()));
    }
    let reach = distinct[distinct.len() - 1];
    let base = body.bounding_box();
    let bbox = BoxRegion::new(
        base.lower.iter().map(|l| l - reach).collect(),
        base.upper.iter().map(|u| u + reach).collect(),
    );
    let box_volume = bbox.volume();
    let mut distances = plan.try_collect(|rng| Ok(body.distance_to_point(&bbox.sample(rng))))?;
    distances.sort_by(f64::total_cmp);
    let total = distances.len() as f64;
    let p_hat: Vec<f64> = epsilons
        .iter()
        .map(|&e| distances.partition_point(|d| *d <= e) as f64 / total)
        .collect();
    let volumes: Vec<EstimatorResult> = p_hat
        .iter()
        .map(|p| EstimatorResult {
            mean: box_volume * p,
            std_error: box_volume * (p * (1.0 - p) / total).sqrt(),
            samples: plan.samples,
            seed: plan.seed,
            importance_volume: box_volume,
        })
        .collect();

    // Columns are the powers ε⁰..εⁿ; power q carries κ_q Vₙ₋_q.
    let m = epsilons.len();
    let a = Matrix::from_fn(m, n + 1, |i, q| epsilons[i].powi(q as i32));
    let y = Vector::from_fn(m, |i, _| volumes[i].mean);
    let mut p_model = p_hat.clone();
    let mut solution = None;
    for _ in 0..GLS_PASSES {
        let sol = gls(&a, &y, &p_model, box_volume, total)?;
        p_model = (&a * &sol.beta)
            .iter()
            .map(|v| (v / box_volume).clamp(0.0, 1.0))
            .collect();
        solution = Some(sol);
    }
    let sol = solution.expect("at least one pass");
    let dof = m - (n + 1);
    let residual = if dof > 0 { sol.chi2 / dof as f64 } else { f64::NAN };

    let mut coefficients = vec![0.0; n + 1];
    let mut intrinsic_volumes = vec![0.0; n + 1];
    let mut std_errors = vec![0.0; n + 1];
    for j in 0..=n {
        let q = n - j;
        coefficients[j] = sol.beta[q];
        intrinsic_volumes[j] = sol.beta[q] / kappa(q);
        std_errors[j] = sol.covariance[(q, q)].max(0.0).sqrt() / kappa(q);
    }
    Ok(SteinerFit {
        epsilons: epsilons.to_vec(),
        volumes,
        coefficients,
        intrinsic_volumes,
        std_errors,
        residual,
    })
}

struct GlsSolution {
    beta: Vector,
    covariance: Matrix,
    chi2: f64,
}

fn gls(a: &Matrix, y: &Vector, p: &[f64], box_volume: f64, total: f64) -> Result<GlsSolution> {
    let m = p.len();
    let scale = box_volume * box_volume / total;
    // A small diagonal floor keeps the covariance positive definite when
    // some hit fractions are 0 or 1, or when epsilons repeat.
    let floor = scale * 1e-10;
    let sigma = Matrix::from_fn(m, m, |i, k| {
        let v = scale * (p[i].min(p[k]) - p[i] * p[k]);
        if i == k {
            v.max(0.0) + floor
        } else {
            v
        }
    });
    let chol = sigma
        .cholesky()
        .ok_or_else(|| Error::Unsupported("volume covariance is not positive definite".into()))?;
    let wa = chol.l().solve_lower_triangular(a).expect("Cholesky factor is invertible");
    let wy = chol.l().solve_lower_triangular(y).expect("Cholesky factor is invertible");
    let svd = wa.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::RankDeficient(condition));
    }
    let beta = svd
        .solve(&wy, 0.0)
        .map_err(|e| Error::Unsupported(format!("least squares solve failed: {e}")))?;
    let covariance = (wa.transpose() * &wa)
        .try_inverse()
        .ok_or(Error::RankDeficient(condition))?;
    let chi2 = (&wy - &wa * &beta).norm_squared();
    Ok(GlsSolution { beta, covariance, chi2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;
    use std::f64::consts::PI;

    fn grid(k: usize) -> Vec<f64> {
        (1..=k).map(|i| i as f64 / k as f64).collect()
    }

    #[test]
    fn volume_of_disc_square_and_ellipse() {
        let plan = McPlan::new(1_000_000, 17);
        let disc = volume_mc(&ConvexBody::unit_ball(2), &plan);
        assert!(disc.sigma_distance(PI) < 3.0, "{disc:?}");
        let sq = volume_mc(&HPolytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), &plan);
        assert!(sq.sigma_distance(1.0) < 3.0);
        let e = ConvexBody::axis_ellipsoid(Vector::zeros(2), &[2.0, 0.5]).unwrap();
        assert!(volume_mc(&e, &plan).sigma_distance(PI) < 3.0);
    }

    #[test]
    fn steiner_fit_of_a_point() {
        let point = ConvexBody::ball(Vector::zeros(2), 0.0).unwrap();
        let fit = steiner_fit(&point, &grid(10), &McPlan::new(500_000, 1)).unwrap();
        let v = &fit.intrinsic_volumes;
        assert!((v[0] - 1.0).abs() < 0.02, "{v:?}");
        assert!(v[1].abs() < 0.05 && v[2].abs() < 0.05, "{v:?}");
    }

    #[test]
    fn rejects_clustered_or_invalid_epsilons() {
        let b = ConvexBody::unit_ball(2);
        assert!(matches!(
            steiner_fit(&b, &[0.5, 0.5, 0.5], &McPlan::new(100, 1)),
            Err(Error::RankDeficient(_))
        ));
        assert!(steiner_fit(&b, &[0.5, -0.1, 0.2], &McPlan::new(100, 1)).is_err());
    }
}
