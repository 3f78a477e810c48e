//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
}

fn gk15<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, m: usize, buf: &mut [f64]) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; m];
    let mut gauss = vec![0.0; m];
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in nodes {
            f(c + s * h * x, buf);
            for k in 0..m {
                kron[k] += wk * buf[k];
                if i % 2 == 1 {
                    gauss[k] += WG[i / 2] * buf[k];
                }
            }
        }
    }
    let mut error = vec![0.0; m];
    for k in 0..m {
        kron[k] *= h;
        gauss[k] *= h;
        error[k] = (kron[k] - gauss[k]).abs();
    }
    Panel {
        a,
        b,
        value: kron,
        error,
    }
}

/// Integrates the `m` components of `f` over `[a, b]` until the summed
/// error estimate of component `k` is at most
/// `max(abs_tol, rel_tol · |value_k|)`.
///
/// `f(x, out)` writes the integrand values at `x` into `out`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, m: usize, abs_tol: f64, rel_tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = vec![0.0; m];
    let mut panels = vec![gk15(&mut f, a, b, m, &mut buf)];
    let mut value = vec![0.0; m];
    let mut error = vec![0.0; m];
    let mut tol = vec![0.0; m];
    loop {
        value.fill(0.0);
        error.fill(0.0);
        for p in &panels {
            for k in 0..m {
                value[k] += p.value[k];
                error[k] += p.error[k];
            }
        }
        for k in 0..m {
            tol[k] = abs_tol.max(rel_tol * value[k].abs());
        }
        if (0..m).all(|k| error[k] <= tol[k]) {
            return Ok(value);
        }
        if panels.len() >= MAX_INTERVALS {
            let worst = (0..m).map(|k| error[k] / tol[k]).fold(0.0, f64::max);
            return Err(Error::Quadrature(format!(
                "no convergence after {MAX_INTERVALS} panels (error {worst:.1e} times the tolerance)"
            )));
        }
        let badness = |p: &Panel| (0..m).map(|k| p.error[k] / tol[k]).fold(0.0, f64::max);
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| badness(x.1).total_cmp(&badness(y.1)))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature("panel width underflow".into()));
        }
        panels.push(gk15(&mut f, p.a, mid, m, &mut buf));
        panels.push(gk15(&mut f, mid, p.b, m, &mut buf));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x, o| o[0] = x.powi(10) + 3.0 * x, 0.0, 2.0, 1, 1e-12, 0.0).unwrap();
        assert!((v[0] - (2f64.powi(11) / 11.0 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_refinement() {
        // ∫₀¹ √x dx = 2/3 and ∫₀^∞ dt/(1+t²) = π/2 after t = u/(1−u).
        let v = integrate(
            |u, o| {
                o[0] = u.sqrt();
                let t = u / (1.0 - u);
                o[1] = 1.0 / (1.0 + t * t) / (1.0 - u).powi(2);
            },
            0.0,
            1.0,
            2,
            1e-12,
            0.0,
        )
        .unwrap();
        assert!((v[0] - 2.0 / 3.0).abs() < 1e-11);
        assert!((v[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x, o| o[0] = (1.0 / x).sin() / x, 0.0, 1.0, 1, 1e-14, 0.0);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }
}
