use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, BoxRegion, ConvexBody};
use crate::matrix_group::{
    eigendecompose, sample_gaussian_sym, sample_haar_orthogonal, Component, OrthogonalMatrix, SymMatrix,
};
use crate::{Matrix, Vector};

/// `ḡ = t ∘ k·e^X`, acting by `x ↦ k e^X x + t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub k: OrthogonalMatrix,
    pub x: SymMatrix,
    pub t: Vec<f64>,
}

impl GroupElement {
    pub fn new(k: OrthogonalMatrix, x: SymMatrix, t: Vector) -> Result<Self> {
        Error::check_dim(k.dim(), x.dim())?;
        Error::check_dim(k.dim(), t.len())?;
        Ok(Self {
            k,
            x,
            t: t.iter().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// The linear part `k e^X`.
    pub fn linear(&self) -> Result<Matrix> {
        let (values, vectors) = eigendecompose(&self.x)?;
        Ok(LinearPart::new(&self.k, values, vectors).matrix())
    }

    pub fn as_affine_map(&self) -> Result<AffineMap> {
        AffineMap::new(self.linear()?, Vector::from_row_slice(&self.t))
    }

    /// `ḡL`.
    pub fn act(&self, body: &ConvexBody) -> Result<ConvexBody> {
        Error::check_dim(self.dim(), body.dim())?;
        let (values, vectors) = eigendecompose(&self.x)?;
        let lin = LinearPart::new(&self.k, values, vectors);
        lin.image(body)?.translate(&Vector::from_row_slice(&self.t))
    }
}

/// `k e^X` with the spectral data `X = V Λ Vᵀ` kept, so that balls map to
/// ellipsoids without a second eigendecomposition.
struct LinearPart {
    k: Matrix,
    v: Matrix,
    /// `e^λ`.
    stretch: Vector,
}

impl LinearPart {
    fn new(k: &OrthogonalMatrix, values: Vector, vectors: OrthogonalMatrix) -> Self {
        Self {
            k: k.as_matrix().clone(),
            v: vectors.as_matrix().clone(),
            stretch: values.map(f64::exp),
        }
    }

    fn rotation(k: &OrthogonalMatrix) -> Self {
        let n = k.dim();
        Self {
            k: k.as_matrix().clone(),
            v: Matrix::identity(n, n),
            stretch: Vector::from_element(n, 1.0),
        }
    }

    fn matrix(&self) -> Matrix {
        &self.k * &self.v * Matrix::from_diagonal(&self.stretch) * self.v.transpose()
    }

    fn image(&self, body: &ConvexBody) -> Result<ConvexBody> {
        let n = body.dim();
        match body {
            ConvexBody::Ball(b) if b.radius() > 0.0 => ConvexBody::ellipsoid(
                self.matrix() * b.center(),
                OrthogonalMatrix::from_trusted(&self.k * &self.v),
                &self.stretch * b.radius(),
            ),
            _ => body.affine_image(&AffineMap::new(self.matrix(), Vector::zeros(n))?),
        }
    }
}

/// Linear part of a draw: `k e^X` for the affine group, `k` alone for
/// rigid motions.
pub(crate) struct LinearDraw {
    pub k: OrthogonalMatrix,
    pub x: SymMatrix,
    lin: LinearPart,
}

impl LinearDraw {
    pub(crate) fn sample<R: Rng + ?Sized>(
        n: usize,
        component: Component,
        gaussian: bool,
        rng: &mut R,
    ) -> Result<Self> {
        let k = sample_haar_orthogonal(n, component, rng);
        if !gaussian {
            let lin = LinearPart::rotation(&k);
            return Ok(Self {
                k,
                x: SymMatrix::zeros(n),
                lin,
            });
        }
        let x = sample_gaussian_sym(n, rng);
        let (values, vectors) = eigendecompose(&x)?;
        let lin = LinearPart::new(&k, values, vectors);
        Ok(Self { k, x, lin })
    }

    /// `gL` before translation.
    pub(crate) fn image(&self, body: &ConvexBody) -> Result<ConvexBody> {
        self.lin.image(body)
    }
}

/// Box containing the support `M + (−gL)` of `t ↦ φ(M ∩ (gL + t))`.
///
/// Coordinate `i` spans `[−h_M(−eᵢ) − h_{gL}(eᵢ), h_M(eᵢ) + h_{gL}(−eᵢ)]`.
pub fn translation_region(m: &ConvexBody, gl: &ConvexBody) -> Result<BoxRegion> {
    Error::check_dim(m.dim(), gl.dim())?;
    let n = m.dim();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut e = Vector::zeros(n);
    for i in 0..n {
        e[i] = 1.0;
        let (hm_pos, hg_pos) = (m.support_value(&e), gl.support_value(&e));
        let ne = -&e;
        let (hm_neg, hg_neg) = (m.support_value(&ne), gl.support_value(&ne));
        lower.push(-hm_neg - hg_pos);
        upper.push(hm_pos + hg_neg);
        e[i] = 0.0;
    }
    Ok(BoxRegion::new(lower, upper))
}

/// One draw from `ν × γ × λ` restricted to the translations that can hit.
pub(crate) struct GroupDraw {
    pub element: GroupElement,
    /// `ḡL`.
    pub image: ConvexBody,
    pub importance_volume: f64,
}

pub(crate) fn draw_motion<R: Rng + ?Sized>(
    m: &ConvexBody,
    l: &ConvexBody,
    component: Component,
    gaussian: bool,
    rng: &mut R,
) -> Result<GroupDraw> {
    Error::check_dim(m.dim(), l.dim())?;
    let lin = LinearDraw::sample(m.dim(), component, gaussian, rng)?;
    let gl = lin.image(l)?;
    let region = translation_region(m, &gl)?;
    let t = region.sample(rng);
    let image = gl.translate(&t)?;
    Ok(GroupDraw {
        element: GroupElement {
            k: lin.k,
            x: lin.x,
            t: t.iter().copied().collect(),
        },
        image,
        importance_volume: region.volume(),
    })
}

/// Draws `ḡ = t ∘ k e^X` with `k` Haar on `component`, `X` standard Gaussian
/// on `Sym(n)` and `t` uniform in [`translation_region`]`(M, k e^X L)`.
///
/// Returns the region's volume as the importance weight, so that
/// `E[φ(M ∩ ḡL) · weight]` is the `m`-integral of `φ(M ∩ ḡL)` whenever
/// `φ(∅) = 0`.
pub fn sample_group_element<R: Rng + ?Sized>(
    m: &ConvexBody,
    l: &ConvexBody,
    component: Component,
    rng: &mut R,
) -> Result<(GroupElement, f64)> {
    let d = draw_motion(m, l, component, true, rng)?;
    Ok((d.element, d.importance_volume))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;
    use crate::sampling::{shard_stream, McPlan};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    fn assert_box(b: &BoxRegion, lower: &[f64], upper: &[f64]) {
        for i in 0..lower.len() {
            assert!((b.lower[i] - lower[i]).abs() < 1e-12, "{b:?}");
            assert!((b.upper[i] - upper[i]).abs() < 1e-12, "{b:?}");
        }
    }

    #[test]
    fn region_examples() {
        let b = ConvexBody::unit_ball(2);
        assert_box(&translation_region(&b, &b).unwrap(), &[-2.0, -2.0], &[2.0, 2.0]);

        let sq = HPolytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_box(&translation_region(&sq, &sq).unwrap(), &[-1.0, -1.0], &[1.0, 1.0]);

        let e = std::f64::consts::E;
        let stretched = ConvexBody::axis_ellipsoid(v(&[0.0, 0.0]), &[e, 1.0]).unwrap();
        assert_box(&translation_region(&b, &stretched).unwrap(), &[-(1.0 + e), -2.0], &[1.0 + e, 2.0]);

        let point = ConvexBody::ball(v(&[0.0, 0.0]), 0.0).unwrap();
        let m = ConvexBody::ball(v(&[3.0, -1.0]), 0.5).unwrap();
        assert_eq!(translation_region(&m, &point).unwrap(), m.bounding_box());
    }

    #[test]
    fn translations_lie_in_the_region() {
        let m = ConvexBody::unit_ball(2);
        let l = HPolytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let mut rng = shard_stream(11, 0);
        for _ in 0..500 {
            let d = draw_motion(&m, &l, Component::Full, true, &mut rng).unwrap();
            let lin = LinearDraw {
                k: d.element.k.clone(),
                x: d.element.x.clone(),
                lin: {
                    let (val, vec) = eigendecompose(&d.element.x).unwrap();
                    LinearPart::new(&d.element.k, val, vec)
                },
            };
            let region = translation_region(&m, &lin.image(&l).unwrap()).unwrap();
            assert!(region.contains(&v(&d.element.t)));
            assert!((region.volume() - d.importance_volume).abs() <= 1e-9 * region.volume());
        }
    }

    #[test]
    fn group_action_matches_affine_map() {
        let mut rng = shard_stream(3, 0);
        let l = ConvexBody::ball(v(&[0.3, -0.2]), 0.7).unwrap();
        let (g, _) = sample_group_element(&l, &l, Component::Full, &mut rng).unwrap();
        let direct = g.act(&l).unwrap();
        let generic = l.affine_image(&g.as_affine_map().unwrap()).unwrap();
        for d in [v(&[1.0, 0.0]), v(&[0.3, -2.0]), v(&[-1.0, 1.0])] {
            assert!((direct.support_value(&d) - generic.support_value(&d)).abs() < 1e-10);
        }
    }

    #[test]
    fn one_dimensional_chi_integral() {
        // Region length is 2 + 2e^X and E[e^X] = e^{1/2}.
        let b = ConvexBody::unit_ball(1);
        let stats = McPlan::new(1_000_000, 5).run(|rng| {
            let d = draw_motion(&b, &b, Component::Full, true, rng).unwrap();
            d.importance_volume
        });
        let target = 2.0 + 2.0 * 0.5f64.exp();
        assert!((stats.mean() - target).abs() < 3.0 * stats.std_error(), "{}", stats.mean());
    }
}
