use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Invertible affine map `x ↦ Ax + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    linear: Matrix,
    translation: Vector,
}

impl AffineMap {
    pub fn new(linear: Matrix, translation: Vector) -> Result<Self> {
        if linear.nrows() != linear.ncols() {
            return Err(Error::DimensionMismatch {
                expected: linear.nrows(),
                found: linear.ncols(),
            });
        }
        Error::check_dim(linear.nrows(), translation.len())?;
        let det = linear.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularMap(det));
        }
        Ok(Self {
            linear,
            translation,
        })
    }

    pub fn linear(linear: Matrix) -> Result<Self> {
        let n = linear.nrows();
        Self::new(linear, Vector::zeros(n))
    }

    pub fn translation(t: Vector) -> Self {
        let n = t.len();
        Self {
            linear: Matrix::identity(n, n),
            translation: t,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear_part(&self) -> &Matrix {
        &self.linear
    }

    pub fn translation_part(&self) -> &Vector {
        &self.translation
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.linear * x + &self.translation
    }

    /// `A⁻ᵀ`, used to push halfspace normals forward.
    pub(crate) fn inverse_transpose(&self) -> Matrix {
        self.linear
            .clone()
            .try_inverse()
            .expect("invertibility checked on construction")
            .transpose()
    }

    /// `Some(s)` when `A = s·Q` with `Q` orthogonal.
    pub(crate) fn similarity_scale(&self) -> Option<f64> {
        let n = self.dim();
        let g = self.linear.transpose() * &self.linear;
        let s2 = g.trace() / n as f64;
        let defect = (g - Matrix::identity(n, n) * s2).amax();
        (defect <= 1e-12 * s2.max(1.0)).then(|| s2.sqrt())
    }
}
