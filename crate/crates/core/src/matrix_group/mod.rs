//! The Cartan factors of `GL(n) = O(n) · exp(Sym(n))`.
//!
//! `Sym(n)` carries the Frobenius inner product and the orthonormal basis
//! `{Δᵢᵢ} ∪ {(Δᵢⱼ + Δⱼᵢ)/√2 : i < j}`; its coordinate chart `h: ℝᵈ → Sym(n)`
//! (`d = n(n+1)/2`) lists the diagonal basis elements first, then the
//! off-diagonal pairs in row-major order.

mod eigen;
mod haar;

pub use eigen::{eigendecompose, expm_sym};
pub use haar::sample_haar_orthogonal;

use std::f64::consts::SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Dimension `n(n+1)/2` of `Sym(n)`.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Element of `Sym(n)`. Construction symmetrizes its input.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self(sym))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(Matrix::from_diagonal(&Vector::from_row_slice(d)))
    }

    /// The chart `h`: coordinates in the orthonormal basis to a matrix.
    pub fn from_coordinates(n: usize, coords: &[f64]) -> Result<Self> {
        Error::check_dim(sym_dim(n), coords.len())?;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = coords[i];
        }
        let mut k = n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = coords[k] / SQRT_2;
                m[(i, j)] = v;
                m[(j, i)] = v;
                k += 1;
            }
        }
        Ok(Self(m))
    }

    /// Inverse chart `h⁻¹`.
    pub fn coordinates(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out: Vec<f64> = (0..n).map(|i| self.0[(i, i)]).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.0[(i, j)] * SQRT_2);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `⟨X, Y⟩_F = tr(XᵀY)`.
    pub fn frobenius_inner(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    /// `k X k⁻¹ = k X kᵀ`.
    pub fn conjugate(&self, k: &OrthogonalMatrix) -> SymMatrix {
        let km = k.as_matrix();
        SymMatrix::new(km * &self.0 * km.transpose()).expect("square by construction")
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rows(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = matrix_from_rows(&Vec::<Vec<f64>>::deserialize(d)?)
            .map_err(serde::de::Error::custom)?;
        SymMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Which part of `O(n)` a Haar sample is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// All of `O(n)`.
    Full,
    /// `SO(n)`, determinant `+1`.
    Special,
    /// `O⁻(n)`, determinant `-1`.
    Reflection,
}

/// Element of `O(n)`; `QᵀQ = I` is checked to `1e-10` on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix(Matrix);

impl OrthogonalMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let defect = (m.transpose() * &m - Matrix::identity(n, n)).amax();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::InvalidBody(format!(
                "matrix is not orthogonal (max |QᵀQ - I| = {defect:e})"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_trusted(m: Matrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n, n))
    }

    /// Counter-clockwise rotation of the plane.
    pub fn rotation2(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn component(&self) -> Component {
        if self.det() > 0.0 {
            Component::Special
        } else {
            Component::Reflection
        }
    }

    pub fn transpose(&self) -> OrthogonalMatrix {
        Self(self.0.transpose())
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.0 * x
    }
}

impl Serialize for OrthogonalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rows(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrthogonalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = matrix_from_rows(&Vec::<Vec<f64>>::deserialize(d)?)
            .map_err(serde::de::Error::custom)?;
        OrthogonalMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Row-major nested representation used by every JSON artifact.
pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: bad.len(),
        });
    }
    Ok(Matrix::from_fn(n, cols, |i, j| rows[i][j]))
}

/// The orthonormal basis of `Sym(n)` in chart order.
pub fn sym_basis(n: usize) -> Vec<SymMatrix> {
    let d = sym_dim(n);
    (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            SymMatrix::from_coordinates(n, &e).expect("coordinate length is d")
        })
        .collect()
}

/// Draw from the standard Gaussian measure on `Sym(n)`: i.i.d. standard
/// normal coordinates in the orthonormal basis, so diagonal entries have
/// variance 1 and off-diagonal entries variance 1/2.
pub fn sample_gaussian_sym<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymMatrix {
    let coords: Vec<f64> = (0..sym_dim(n))
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    SymMatrix::from_coordinates(n, &coords).expect("coordinate length is d")
}
