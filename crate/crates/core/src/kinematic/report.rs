use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{crofton_coefficient, lhs_kinematic, rhs_hadwiger_compact, rhs_hadwiger_gl, KinematicGroup, RhsValue};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::intrinsic_volumes::{intrinsic_volumes_closed, Valuation};
use crate::sampling::{sigma_distance, EstimatorResult, McPlan};

/// Which normalization of the affine right-hand side the LHS matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `2 Σ cⱼ φₙ₋ⱼ(M) Vⱼ(L)`.
    Full,
    /// `Σ cⱼ φₙ₋ⱼ(M) Vⱼ(L)`.
    Half,
    /// Rigid motions: `Σ φₙ₋ⱼ(M) Vⱼ(L)`.
    Compact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsTerm {
    pub j: usize,
    pub c_j: EstimatorResult,
    /// `φₙ₋ⱼ(M)`.
    pub phi_coeff: EstimatorResult,
    /// `Vⱼ(L)`.
    pub v_j: f64,
    /// `prefactor · cⱼ φₙ₋ⱼ(M) Vⱼ(L)`.
    pub term: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinematicReport {
    pub group: KinematicGroup,
    pub phi: String,
    pub n: usize,
    pub lhs: EstimatorResult,
    pub rhs_terms: Vec<RhsTerm>,
    pub rhs_total: f64,
    pub rhs_std_error: f64,
    /// `|lhs − rhs_total|` in combined standard errors.
    pub discrepancy_sigma: f64,
    /// For the affine group: the same sum without the factor 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_half: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy_sigma_half: Option<f64>,
    /// `lhs / rhs_total`.
    pub ratio: f64,
    /// The convention matched within 3σ, if any.
    pub selected_convention: Option<Convention>,
}

/// Everything a report needs besides the bodies.
#[derive(Clone, Debug)]
pub struct ReportInputs<'a> {
    pub group: KinematicGroup,
    pub phi: &'a Valuation,
    pub lhs_plan: McPlan,
    pub crofton_plan: McPlan,
    /// `c₀..c_n`; required for the affine group.
    pub c: Option<Vec<EstimatorResult>>,
}

const MATCH_SIGMA: f64 = 3.0;

/// Estimates the LHS and assembles the RHS term table. `L` must have
/// closed-form intrinsic volumes (ball, ellipsoid, box or polygon).
pub fn kinematic_report(inputs: &ReportInputs<'_>, m: &ConvexBody, l: &ConvexBody) -> Result<KinematicReport> {
    Error::check_dim(m.dim(), l.dim())?;
    let n = m.dim();
    let v_l = intrinsic_volumes_closed(l).ok_or_else(|| {
        Error::Unsupported(format!("L needs closed-form V_j, none for a {}", l.kind()))
    })?;
    let c = match (inputs.group, &inputs.c) {
        (KinematicGroup::Gl, Some(c)) => c.clone(),
        (KinematicGroup::Gl, None) => {
            return Err(Error::LengthMismatch("the affine right-hand side needs c_0..c_n".into()))
        }
        (_, _) => vec![EstimatorResult::exact(1.0, 0, 0); n + 1],
    };
    if c.len() != n + 1 {
        return Err(Error::LengthMismatch(format!("expected {} constants, got {}", n + 1, c.len())));
    }

    let (lhs, crofton) = rayon::join(
        || lhs_kinematic(inputs.group, inputs.phi, m, l, &inputs.lhs_plan),
        || {
            (0..=n)
                .map(|j| crofton_coefficient(inputs.phi, m, j, &inputs.crofton_plan.reseeded(j as u64)))
                .collect::<Result<Vec<_>>>()
        },
    );
    let (lhs, crofton) = (lhs?, crofton?);

    let (rhs, prefactor): (RhsValue, f64) = if inputs.group.is_affine() {
        (rhs_hadwiger_gl(&c, &crofton, &v_l)?, 2.0)
    } else {
        (rhs_hadwiger_compact(&crofton, &v_l)?, 1.0)
    };
    let rhs_terms = (0..=n)
        .map(|j| {
            let (cj, fj, vj) = (c[j], crofton[j], v_l[j]);
            RhsTerm {
                j,
                c_j: cj,
                phi_coeff: fj,
                v_j: vj,
                term: prefactor * cj.mean * fj.mean * vj,
                std_error: prefactor
                    * vj
                    * ((fj.mean * cj.std_error).powi(2) + (cj.mean * fj.std_error).powi(2)).sqrt(),
            }
        })
        .collect();
    let discrepancy_sigma = sigma_distance(lhs.mean, lhs.std_error, rhs.value, rhs.std_error);
    let (rhs_half, discrepancy_sigma_half) = if inputs.group.is_affine() {
        let d = sigma_distance(lhs.mean, lhs.std_error, rhs.value / 2.0, rhs.std_error / 2.0);
        (Some(rhs.value / 2.0), Some(d))
    } else {
        (None, None)
    };
    let selected_convention = match discrepancy_sigma_half {
        Some(half) => {
            let candidates = [(Convention::Full, discrepancy_sigma), (Convention::Half, half)];
            candidates
                .into_iter()
                .filter(|(_, d)| *d <= MATCH_SIGMA)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(c, _)| c)
        }
        None => (discrepancy_sigma <= MATCH_SIGMA).then_some(Convention::Compact),
    };
    Ok(KinematicReport {
        group: inputs.group,
        phi: inputs.phi.name.clone(),
        n,
        lhs,
        rhs_terms,
        rhs_total: rhs.value,
        rhs_std_error: rhs.std_error,
        discrepancy_sigma,
        rhs_half,
        discrepancy_sigma_half,
        ratio: lhs.mean / rhs.value,
        selected_convention,
    })
}

impl KinematicReport {
    pub const CSV_HEADER: &'static str = "j,c_j,phi_coeff,V_j,term,std_error";

    /// One row per `j`: `j, c_j, phi_coeff, V_j, term, std_error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for t in &self.rhs_terms {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                t.j, t.c_j.mean, t.phi_coeff.mean, t.v_j, t.term, t.std_error
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_report_for_unit_discs() {
        let phi = Valuation::euler();
        let b = ConvexBody::unit_ball(2);
        let inputs = ReportInputs {
            group: KinematicGroup::So,
            phi: &phi,
            lhs_plan: McPlan::new(100_000, 1),
            crofton_plan: McPlan::new(100_000, 2),
            c: None,
        };
        let r = kinematic_report(&inputs, &b, &b).unwrap();
        assert!((r.rhs_total - 4.0 * std::f64::consts::PI).abs() < 0.1);
        assert!(r.discrepancy_sigma < 4.0, "{r:?}");
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with(KinematicReport::CSV_HEADER));
        assert!(r.to_json().unwrap().contains("\"selected_convention\""));
    }

    #[test]
    fn affine_report_needs_constants() {
        let phi = Valuation::euler();
        let b = ConvexBody::unit_ball(2);
        let inputs = ReportInputs {
            group: KinematicGroup::Gl,
            phi: &phi,
            lhs_plan: McPlan::new(10, 1),
            crofton_plan: McPlan::new(10, 2),
            c: None,
        };
        assert!(kinematic_report(&inputs, &b, &b).is_err());
    }
}
