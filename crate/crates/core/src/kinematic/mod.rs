//! Both sides of the kinematic formulas.
//!
//! For the affine group, with `m = ν_{O(n)} × γ_{Sym(n)} × λ`,
//!
//! ```text
//! ∫ φ(M ∩ ḡL) dm(ḡ)   vs   2 Σⱼ cⱼ φₙ₋ⱼ(M) Vⱼ(L),
//! ```
//!
//! and for rigid motions (`X = 0`) the compact baseline `Σⱼ φₙ₋ⱼ(M) Vⱼ(L)`.
//! Here `φₙ₋ⱼ(M) = ∫ φ(M ∩ E) dμⱼ(E)` is the Crofton coefficient over affine
//! `j`-flats, normalized so that the flats meeting `Bⁿ` have mass `κₙ₋ⱼ`.

mod lemma;
mod report;

pub use lemma::{random_polygon, separation_lemma_check, separation_lemma_check_random, LemmaReport, Stratum};
pub use report::{kinematic_report, Convention, KinematicReport, ReportInputs, RhsTerm};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::intrinsic_volumes::{Section, Valuation};
use crate::matrix_group::Component;
use crate::sampling::group::draw_motion;
use crate::sampling::{sample_affine_flat, EstimatorResult, McPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KinematicGroup {
    /// `GL(n) ⋉ ℝⁿ` with `ν_{O(n)} × γ × λ`.
    Gl,
    /// `O(n) ⋉ ℝⁿ`.
    O,
    /// `SO(n) ⋉ ℝⁿ`.
    So,
}

impl KinematicGroup {
    pub fn component(self) -> Component {
        match self {
            Self::Gl | Self::O => Component::Full,
            Self::So => Component::Special,
        }
    }

    pub fn is_affine(self) -> bool {
        self == Self::Gl
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gl => "gl",
            Self::O => "o",
            Self::So => "so",
        }
    }
}

/// Monte Carlo estimate of `∫ φ(M ∩ ḡL) dḡ` over the chosen group.
///
/// Each draw contributes `φ(M ∩ ḡL) · |R|`, where the translation is uniform
/// in the box `R ⊇ M − gL` outside of which the integrand vanishes. The
/// reported `importance_volume` is the mean of `|R|`.
pub fn lhs_kinematic(
    group: KinematicGroup,
    phi: &Valuation,
    m: &ConvexBody,
    l: &ConvexBody,
    plan: &McPlan,
) -> Result<EstimatorResult> {
    Error::check_dim(m.dim(), l.dim())?;
    let (values, volumes) = plan.try_run_pairs(|rng| {
        let d = draw_motion(m, l, group.component(), group.is_affine(), rng)?;
        let v = phi.evaluate(&Section::Pair(m, &d.image), rng)?;
        Ok((v * d.importance_volume, d.importance_volume))
    })?;
    Ok(EstimatorResult::from_stats(&values, plan.seed, volumes.mean()))
}

/// Default offset window for Crofton sampling: the smallest origin-centered
/// ball containing `M`.
pub fn default_window(m: &ConvexBody) -> f64 {
    let r = m.origin_radius();
    if r > 0.0 {
        r
    } else {
        1.0
    }
}

/// `φₙ₋ⱼ(M) = ∫ φ(M ∩ E) dμⱼ(E)`, with the default window.
pub fn crofton_coefficient(phi: &Valuation, m: &ConvexBody, j: usize, plan: &McPlan) -> Result<EstimatorResult> {
    crofton_coefficient_with_window(phi, m, j, default_window(m), plan)
}

/// As [`crofton_coefficient`], sampling offsets in the `(n − j)`-ball of
/// radius `window`, which must contain the projection of `M`.
pub fn crofton_coefficient_with_window(
    phi: &Valuation,
    m: &ConvexBody,
    j: usize,
    window: f64,
    plan: &McPlan,
) -> Result<EstimatorResult> {
    let n = m.dim();
    if j > n {
        return Err(Error::OutOfRange(format!("flat dimension {j} exceeds n = {n}")));
    }
    let needed = m.origin_radius();
    if window < needed * (1.0 - 1e-12) {
        return Err(Error::OutOfRange(format!(
            "window radius {window} is smaller than the body's origin radius {needed}"
        )));
    }
    if phi.is_volume() && j < n {
        // Proper sections are null sets.
        return Ok(EstimatorResult::exact(0.0, plan.samples, plan.seed));
    }
    let (values, _) = plan.try_run_pairs(|rng| {
        let (flat, w) = sample_affine_flat(n, j, window, rng)?;
        Ok((phi.evaluate(&Section::Flat(m, &flat), rng)? * w, 0.0))
    })?;
    let mut r = EstimatorResult::from_stats(&values, plan.seed, 0.0);
    r.importance_volume = crate::intrinsic_volumes::kappa(n - j) * window.powi((n - j) as i32);
    Ok(r)
}

/// A right-hand side with its first-order standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsValue {
    pub value: f64,
    pub std_error: f64,
}

fn check_lengths(c: usize, crofton: usize, v: usize) -> Result<()> {
    if c == crofton && crofton == v && c > 0 {
        Ok(())
    } else {
        Err(Error::LengthMismatch(format!(
            "c has {c} entries, crofton {crofton}, V(L) {v}; all must be n + 1"
        )))
    }
}

/// `2 Σⱼ cⱼ φₙ₋ⱼ(M) Vⱼ(L)`, with `crofton[j] = φₙ₋ⱼ(M)`.
pub fn rhs_hadwiger_gl(c: &[EstimatorResult], crofton: &[EstimatorResult], v_l: &[f64]) -> Result<RhsValue> {
    check_lengths(c.len(), crofton.len(), v_l.len())?;
    let mut value = 0.0;
    let mut var = 0.0;
    for ((cj, fj), vj) in c.iter().zip(crofton).zip(v_l) {
        value += 2.0 * cj.mean * fj.mean * vj;
        var += (2.0 * vj).powi(2) * ((fj.mean * cj.std_error).powi(2) + (cj.mean * fj.std_error).powi(2));
    }
    Ok(RhsValue {
        value,
        std_error: var.sqrt(),
    })
}

/// `Σⱼ φₙ₋ⱼ(M) Vⱼ(L)`, the rigid-motion right-hand side.
pub fn rhs_hadwiger_compact(crofton: &[EstimatorResult], v_l: &[f64]) -> Result<RhsValue> {
    check_lengths(crofton.len(), crofton.len(), v_l.len())?;
    let value = crofton.iter().zip(v_l).map(|(f, v)| f.mean * v).sum();
    let var: f64 = crofton.iter().zip(v_l).map(|(f, v)| (f.std_error * v).powi(2)).sum();
    Ok(RhsValue {
        value,
        std_error: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic_volumes::kappa;
    use crate::Vector;

    #[test]
    fn point_section_counts_translations() {
        // χ(M ∩ (p + t)) = 1 exactly when t ∈ M − p.
        let m = ConvexBody::axis_ellipsoid(Vector::zeros(2), &[1.5, 0.5]).unwrap();
        let p = ConvexBody::ball(Vector::from_vec(vec![0.3, 0.1]), 0.0).unwrap();
        let r = lhs_kinematic(KinematicGroup::So, &Valuation::euler(), &m, &p, &McPlan::new(200_000, 1)).unwrap();
        assert!(r.sigma_distance(0.75 * std::f64::consts::PI) < 3.0, "{r:?}");
    }

    #[test]
    fn crofton_trivial_cases() {
        let b = ConvexBody::unit_ball(3);
        let plan = McPlan::new(1000, 2);
        let vn = crofton_coefficient(&Valuation::volume(3), &b, 1, &plan).unwrap();
        assert_eq!((vn.mean, vn.std_error), (0.0, 0.0));
        let all = crofton_coefficient(&Valuation::volume(3), &b, 3, &plan).unwrap();
        assert!((all.mean - kappa(3)).abs() < 1e-12);
        let point = ConvexBody::ball(Vector::from_vec(vec![0.2, 0.0, 0.0]), 0.0).unwrap();
        for j in 1..3 {
            assert_eq!(crofton_coefficient(&Valuation::euler(), &point, j, &plan).unwrap().mean, 0.0);
        }
        assert!(crofton_coefficient_with_window(&Valuation::euler(), &b, 1, 0.5, &plan).is_err());
    }

    #[test]
    fn rhs_assembly() {
        let e = |m: f64| EstimatorResult::exact(m, 1, 0);
        let c = [e(1.0), e(2.0), e(3.0)];
        let zero = [e(0.0), e(0.0), e(0.0)];
        assert_eq!(rhs_hadwiger_gl(&c, &zero, &[1.0, 1.0, 1.0]).unwrap().value, 0.0);
        let f = [e(0.0), e(0.0), e(5.0)];
        assert_eq!(rhs_hadwiger_gl(&c, &f, &[1.0, 2.0, 7.0]).unwrap().value, 2.0 * 3.0 * 5.0 * 7.0);
        assert!(matches!(
            rhs_hadwiger_gl(&c[..2], &f, &[1.0, 1.0, 1.0]),
            Err(Error::LengthMismatch(_))
        ));
    }
}
