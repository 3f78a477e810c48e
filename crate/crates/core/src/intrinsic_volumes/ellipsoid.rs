use super::quadrature::integrate;
use super::kappa;
use crate::error::{Error, Result};

/// Absolute tolerance of each `I`-integral (on geometric-mean-normalized
/// axes), relaxed to a relative one for weighted terms above 1.
const QUAD_TOL: f64 = 1e-10;
const QUAD_REL_TOL: f64 = 1e-12;

/// Supported spread of the axes: `|ln aᵢ − ln g| ≤ 30` about their
/// geometric mean `g`.
const MAX_LOG_RATIO: f64 = 30.0;

/// `e₀..e_k` of `xs`, by the direct product-expansion recurrence.
pub fn elementary_symmetric(xs: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (m, &x) in xs.iter().enumerate() {
        for r in (1..=k.min(m + 1)).rev() {
            e[r] += x * e[r - 1];
        }
    }
    e
}

fn validate(semiaxes: &[f64]) -> Result<f64> {
    if semiaxes.is_empty() {
        return Err(Error::InvalidBody("ellipsoid needs at least one semiaxis".into()));
    }
    if semiaxes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidBody("ellipsoid semiaxes must be strictly positive".into()));
    }
    let log_g = semiaxes.iter().map(|a| a.ln()).sum::<f64>() / semiaxes.len() as f64;
    if semiaxes.iter().any(|a| (a.ln() - log_g).abs() > MAX_LOG_RATIO) {
        return Err(Error::Quadrature(format!(
            "axis ratios beyond e^±{MAX_LOG_RATIO} are not supported"
        )));
    }
    Ok(log_g.exp())
}

/// `V₀, …, V_n` of the ellipsoid with the given semiaxes.
///
/// `Vⱼ = κⱼ Σᵢ aᵢ² s_{j−1}(a²∖aᵢ) Iᵢⱼ` with
/// `Iᵢⱼ = ∫₀^∞ tʲ⁻¹ / ((aᵢ²t² + 1) ∏ₗ √(aₗ²t² + 1)) dt`, evaluated on axes
/// rescaled to unit geometric mean `g` (then `Vⱼ(a) = gʲ Vⱼ(a/g)`) after
/// the substitution `t = u/(1−u)`; all `n²` integrals share one adaptive
/// quadrature.
pub fn intrinsic_volumes_ellipsoid(semiaxes: &[f64]) -> Result<Vec<f64>> {
    let g = validate(semiaxes)?;
    let n = semiaxes.len();
    let a2: Vec<f64> = semiaxes.iter().map(|a| (a / g).powi(2)).collect();
    // Weighted terms aᵢ² s_{j−1}(a²∖aᵢ) Iᵢⱼ at index i·n + (j − 1).
    let mut weights = vec![0.0; n * n];
    let mut others = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        others.clear();
        others.extend(a2.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, a)| *a));
        let s = elementary_symmetric(&others, n - 1);
        for j in 1..=n {
            weights[i * n + j - 1] = a2[i] * s[j - 1];
        }
    }
    // With t = u/(1−u), the half u ∈ [1/2, 1) is integrated in v = 1 − u so
    // that t = (1−v)/v stays accurate as u → 1.
    let integrand = |reflected: bool| {
        let a2 = &a2;
        let weights = &weights;
        move |x: f64, out: &mut [f64]| {
            let (t, jac) = if reflected {
                if x <= 0.0 {
                    out.fill(0.0);
                    return;
                }
                ((1.0 - x) / x, 1.0 / (x * x))
            } else {
                (x / (1.0 - x), 1.0 / ((1.0 - x) * (1.0 - x)))
            };
            let t2 = t * t;
            let root: f64 = a2.iter().map(|a| (a * t2 + 1.0).sqrt()).product();
            for i in 0..n {
                let base = jac / ((a2[i] * t2 + 1.0) * root);
                let mut tp = 1.0;
                for j in 1..=n {
                    out[i * n + j - 1] = weights[i * n + j - 1] * base * tp;
                    tp *= t;
                }
            }
        }
    };
    let lower = integrate(integrand(false), 0.0, 0.5, n * n, QUAD_TOL / 2.0, QUAD_REL_TOL)?;
    let upper = integrate(integrand(true), 0.0, 0.5, n * n, QUAD_TOL / 2.0, QUAD_REL_TOL)?;
    let terms: Vec<f64> = lower.iter().zip(&upper).map(|(a, b)| a + b).collect();
    let mut out = vec![1.0; n + 1];
    for j in 1..=n {
        let sum: f64 = (0..n).map(|i| terms[i * n + j - 1]).sum();
        out[j] = kappa(j) * sum * g.powi(j as i32);
    }
    Ok(out)
}

/// `Vⱼ` of the ellipsoid with the given semiaxes; `j = 0` gives 1.
pub fn intrinsic_volume_ellipsoid(semiaxes: &[f64], j: usize) -> Result<f64> {
    let n = semiaxes.len();
    if j > n {
        return Err(Error::OutOfRange(format!("j = {j} exceeds the dimension {n}")));
    }
    if j == 0 {
        validate(semiaxes)?;
        return Ok(1.0);
    }
    Ok(intrinsic_volumes_ellipsoid(semiaxes)?[j])
}
