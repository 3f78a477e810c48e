//! The constants `cⱼ = E[Vⱼ(e^X Bⁿ)] / Vⱼ(Bⁿ)`, `X` standard Gaussian on
//! `Sym(n)`, by two routes.
//!
//! * Direct: sample `X`, take its eigenvalues `λ`, evaluate the ellipsoid
//!   with semiaxes `e^λ`.
//! * Eigenvalue density: `λ` has density
//!   `Z_n⁻¹ e^{−|λ|²/2} ∏_{l<m} |λ_l − λ_m|` on `ℝⁿ`, which is integrated
//!   by importance sampling from `N(0, s²I)` with `s² = (n+1)/2`.
//!
//! `c₀ = 1` and `c_n = E[det e^X] = E[e^{tr X}] = e^{n/2}` anchor both.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::intrinsic_volumes::{intrinsic_volume_ball, intrinsic_volumes_ellipsoid};
use crate::matrix_group::{eigendecompose, sample_gaussian_sym};
use crate::sampling::{EstimatorResult, McPlan, RunningStats};
use crate::MAX_DIM;

/// Largest `n` the eigenvalue-density route accepts.
pub const WEYL_MAX_DIM: usize = 4;
/// Minimum effective sample size, as a fraction of the sample count.
pub const MIN_ESS_FRACTION: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Weyl,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Weyl => "weyl",
        }
    }
}

/// `Z_n = 2^{n/2} n! ∏_{l=1}^n Γ(l/2)`.
pub fn z_n(n: usize) -> f64 {
    ln_z_n(n).exp()
}

fn ln_z_n(n: usize) -> f64 {
    let n_f = n as f64;
    0.5 * n_f * 2f64.ln() + ln_gamma(n_f + 1.0) + (1..=n).map(|l| ln_gamma(l as f64 / 2.0)).sum::<f64>()
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("n = {n} is outside the supported range 1..={max}")))
    }
}

fn check_j(n: usize, j: usize) -> Result<()> {
    if j <= n {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("j = {j} exceeds n = {n}")))
    }
}

fn ball_volumes(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| intrinsic_volume_ball(n, j, 1.0).expect("j ≤ n"))
        .collect()
}

fn normalized(n: usize, stats: &[RunningStats], seed: u64) -> Vec<EstimatorResult> {
    ball_volumes(n)
        .iter()
        .zip(stats)
        .map(|(vb, s)| {
            let mut r = EstimatorResult::from_stats(s, seed, 1.0);
            r.mean /= vb;
            r.std_error /= vb;
            r
        })
        .collect()
}

/// `c₀, …, c_n` by the direct route, all from the same draws.
pub fn c_direct_all(n: usize, plan: &McPlan) -> Result<Vec<EstimatorResult>> {
    check_n(n, MAX_DIM)?;
    let stats = plan.try_run_vec(n + 1, |rng, out| {
        let x = sample_gaussian_sym(n, rng);
        let (lambda, _) = eigendecompose(&x)?;
        let semiaxes: Vec<f64> = lambda.iter().map(|l| l.exp()).collect();
        out.copy_from_slice(&intrinsic_volumes_ellipsoid(&semiaxes)?);
        Ok(())
    })?;
    Ok(normalized(n, &stats, plan.seed))
}

/// `cⱼ` by the direct route. `c₀` is returned exactly.
pub fn c_direct(n: usize, j: usize, plan: &McPlan) -> Result<EstimatorResult> {
    check_n(n, MAX_DIM)?;
    check_j(n, j)?;
    if j == 0 {
        return Ok(EstimatorResult::exact(1.0, plan.samples, plan.seed));
    }
    Ok(c_direct_all(n, plan)?[j])
}

/// `c_n` as `E[e^{tr X}]`, bypassing the eigendecomposition.
pub fn c_direct_determinant(n: usize, plan: &McPlan) -> Result<EstimatorResult> {
    check_n(n, MAX_DIM)?;
    let stats = plan.run(|rng| sample_gaussian_sym(n, rng).trace().exp());
    Ok(EstimatorResult::from_stats(&stats, plan.seed, 1.0))
}

/// Eigenvalue-density estimates with their weight diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylEstimate {
    /// `c₀, …, c_n`; `c₀` is the mean weight, i.e. the estimate of the
    /// density's total mass.
    pub c: Vec<EstimatorResult>,
    pub ess: f64,
    pub ess_fraction: f64,
}

/// Proposal variance minimizing the weight variance of the Vandermonde
/// factor among isotropic normals.
fn proposal_variance(n: usize) -> f64 {
    (n as f64 + 1.0) / 2.0
}

/// All `cⱼ` by importance sampling the eigenvalue density.
///
/// Fails with [`Error::LowEffectiveSampleSize`] when the effective sample
/// size falls below 5% of the draws.
pub fn c_weyl_all(n: usize, plan: &McPlan) -> Result<WeylEstimate> {
    check_n(n, WEYL_MAX_DIM)?;
    let s2 = proposal_variance(n);
    let s = s2.sqrt();
    let ln_const = 0.5 * n as f64 * (2.0 * PI * s2).ln() - ln_z_n(n);
    let damp = 0.5 * (1.0 - 1.0 / s2);
    // Slot n + 1 carries w² for the effective sample size.
    let stats = plan.try_run_vec(n + 2, |rng, out| {
        let lambda: Vec<f64> = (0..n).map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect();
        let mut vandermonde = 1.0;
        for l in 0..n {
            for m in l + 1..n {
                vandermonde *= (lambda[l] - lambda[m]).abs();
            }
        }
        let sq: f64 = lambda.iter().map(|x| x * x).sum();
        let w = (ln_const - damp * sq).exp() * vandermonde;
        let semiaxes: Vec<f64> = lambda.iter().map(|l| l.exp()).collect();
        let v = intrinsic_volumes_ellipsoid(&semiaxes)?;
        for j in 0..=n {
            out[j] = w * v[j];
        }
        out[n + 1] = w * w;
        Ok(())
    })?;
    let count = stats[0].count() as f64;
    let sum_w = stats[0].mean() * count;
    let sum_w2 = stats[n + 1].mean() * count;
    let ess = if sum_w2 > 0.0 { sum_w * sum_w / sum_w2 } else { 0.0 };
    let required = MIN_ESS_FRACTION * count;
    if ess < required {
        return Err(Error::LowEffectiveSampleSize { ess, required });
    }
    Ok(WeylEstimate {
        c: normalized(n, &stats[..=n], plan.seed),
        ess,
        ess_fraction: ess / count,
    })
}

/// `cⱼ` by the eigenvalue-density route.
pub fn c_weyl(n: usize, j: usize, plan: &McPlan) -> Result<EstimatorResult> {
    check_j(n, j)?;
    Ok(c_weyl_all(n, plan)?.c[j])
}

/// A full set `c₀..c_n` from one route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylConstants {
    pub n: usize,
    pub method: Method,
    pub c: Vec<EstimatorResult>,
    pub z_n: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ess: Option<f64>,
}

impl WeylConstants {
    pub fn compute(n: usize, method: Method, plan: &McPlan) -> Result<Self> {
        let (c, ess) = match method {
            Method::Direct => {
                let mut c = c_direct_all(n, plan)?;
                c[0] = EstimatorResult::exact(1.0, plan.samples, plan.seed);
                (c, None)
            }
            Method::Weyl => {
                let w = c_weyl_all(n, plan)?;
                (w.c, Some(w.ess))
            }
        };
        Ok(Self {
            n,
            method,
            c,
            z_n: z_n(n),
            ess,
        })
    }

    pub fn means(&self) -> Vec<f64> {
        self.c.iter().map(|r| r.mean).collect()
    }

    pub fn cache_entries(&self) -> Vec<CacheEntry> {
        self.c
            .iter()
            .enumerate()
            .map(|(j, r)| CacheEntry {
                n: self.n,
                j,
                method: self.method,
                mean: r.mean,
                std_error: r.std_error,
                samples: r.samples,
                seed: r.seed,
            })
            .collect()
    }

    /// Writes one cache file per `j` into `dir`.
    pub fn write_cache(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for e in self.cache_entries() {
            std::fs::write(e.path(dir), serde_json::to_string_pretty(&e)?)?;
        }
        Ok(())
    }

    /// Loads a complete set from `dir`, or `None` if any entry is missing
    /// or was computed with a different budget.
    pub fn load_cache(dir: &Path, n: usize, method: Method, plan: &McPlan) -> Result<Option<Self>> {
        let mut c = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let path = CacheEntry::path_for(dir, n, j, method, plan.seed);
            if !path.exists() {
                return Ok(None);
            }
            let e: CacheEntry = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if e.samples != plan.samples || e.n != n || e.j != j || e.method != method {
                return Ok(None);
            }
            c.push(EstimatorResult {
                mean: e.mean,
                std_error: e.std_error,
                samples: e.samples,
                seed: e.seed,
                importance_volume: 1.0,
            });
        }
        Ok(Some(Self {
            n,
            method,
            c,
            z_n: z_n(n),
            ess: None,
        }))
    }
}

/// One cached constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub n: usize,
    pub j: usize,
    pub method: Method,
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl CacheEntry {
    fn path_for(dir: &Path, n: usize, j: usize, method: Method, seed: u64) -> PathBuf {
        dir.join(format!("c_n{n}_j{j}_{}_seed{seed}.json", method.as_str()))
    }

    pub fn path(&self, dir: &Path) -> PathBuf {
        Self::path_for(dir, self.n, self.j, self.method, self.seed)
    }
}
