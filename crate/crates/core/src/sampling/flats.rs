use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::gjk::{self, Mode};
use crate::geometry::ConvexBody;
use crate::matrix_group::{rows, sample_haar_orthogonal, Component};
use crate::{Matrix, Vector};

/// Affine `j`-flat `offset + span(basis)`, with `offset ⊥ span(basis)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFlat {
    basis: Matrix,
    /// Orthonormal basis of the complement; `offset = normal · s`.
    normal: Matrix,
    /// Offset in `normal` coordinates.
    s: Vector,
}

impl AffineFlat {
    pub fn new(basis: Matrix, normal: Matrix, s: Vector) -> Result<Self> {
        let n = basis.nrows();
        Error::check_dim(n, normal.nrows())?;
        Error::check_dim(n, basis.ncols() + normal.ncols())?;
        Error::check_dim(normal.ncols(), s.len())?;
        let q = Matrix::from_fn(n, n, |r, c| {
            if c < basis.ncols() {
                basis[(r, c)]
            } else {
                normal[(r, c - basis.ncols())]
            }
        });
        if (q.transpose() * &q - Matrix::identity(n, n)).amax() > 1e-10 {
            return Err(Error::InvalidBody("flat bases are not orthonormal".into()));
        }
        Ok(Self { basis, normal, s })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn flat_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn offset(&self) -> Vector {
        &self.normal * &self.s
    }

    pub fn contains(&self, x: &Vector) -> bool {
        (self.normal.transpose() * x - &self.s).norm() <= 1e-12 * (1.0 + x.norm())
    }

    /// `E ∩ K ≠ ∅`, decided in the complement: `s ∈ Wᵀ K`.
    pub fn hits(&self, body: &ConvexBody) -> Result<bool> {
        Error::check_dim(self.ambient_dim(), body.dim())?;
        let m = self.normal.ncols();
        if m == 0 {
            return Ok(true);
        }
        if let ConvexBody::Ball(b) = body {
            let d = self.normal.transpose() * b.center() - &self.s;
            return Ok(d.norm() <= b.radius());
        }
        let w = &self.normal;
        let support = |d: &Vector| w.transpose() * body.support_point(&(w * d)) - &self.s;
        let tol = 1e-10 * (1.0 + body.origin_radius());
        let c = gjk::closest_to_origin(support, &Vector::zeros(m), Mode::Intersect, tol);
        Ok(c.distance() <= tol)
    }
}

#[derive(Serialize, Deserialize)]
struct FlatRepr {
    basis: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl Serialize for AffineFlat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FlatRepr {
            basis: rows(&self.basis),
            offset: self.offset().iter().copied().collect(),
        }
        .serialize(s)
    }
}

/// Draws a `j`-flat from `μⱼ` restricted to flats meeting `window_radius·Bⁿ`.
///
/// The direction is the span of the first `j` columns of a Haar matrix and
/// the offset is uniform in the `(n−j)`-ball of radius `window_radius` in
/// its orthogonal complement. The importance weight `κ_{n−j}·Rⁿ⁻ʲ` is the
/// `μⱼ`-measure of that set, so flats meeting `Bⁿ` have total mass `κ_{n−j}`.
pub fn sample_affine_flat<R: Rng + ?Sized>(
    n: usize,
    j: usize,
    window_radius: f64,
    rng: &mut R,
) -> Result<(AffineFlat, f64)> {
    if j > n {
        return Err(Error::OutOfRange(format!("flat dimension {j} exceeds ambient dimension {n}")));
    }
    if !(window_radius > 0.0) || !window_radius.is_finite() {
        return Err(Error::OutOfRange(format!("window radius {window_radius} must be positive")));
    }
    let q = sample_haar_orthogonal(n, Component::Full, rng);
    let q = q.as_matrix();
    let m = n - j;
    let basis = q.columns(0, j).into_owned();
    let normal = q.columns(j, m).into_owned();
    let s = uniform_in_ball(m, window_radius, rng);
    let weight = crate::intrinsic_volumes::kappa(m) * window_radius.powi(m as i32);
    Ok((AffineFlat { basis, normal, s }, weight))
}

fn uniform_in_ball<R: Rng + ?Sized>(m: usize, radius: f64, rng: &mut R) -> Vector {
    if m == 0 {
        return Vector::zeros(0);
    }
    let g = Vector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let r = radius * rng.random::<f64>().powf(1.0 / m as f64);
    let norm = g.norm();
    if norm == 0.0 {
        return Vector::zeros(m);
    }
    g * (r / norm)
}
