use crate::error::{Error, Result};
use crate::{Matrix, Vector};

use super::{OrthogonalMatrix, SymMatrix};

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition `X = V diag(λ) Vᵀ`.
///
/// Eigenvalues are returned in descending order with the columns of `V`
/// permuted to match. Each rotation annihilates one off-diagonal pair; the
/// sweep loop stops once the off-diagonal mass falls below `1e-15·‖X‖_F`.
pub fn eigendecompose(x: &SymMatrix) -> Result<(Vector, OrthogonalMatrix)> {
    let n = x.dim();
    let mut a = x.as_matrix().clone();
    let mut v = Matrix::identity(n, n);
    let scale = a.norm();
    let target = 1e-15 * scale;

    let mut converged = n < 2 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(&mut a, p, q, c, s);
                rotate_rows(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::Convergence {
            what: "Jacobi eigendecomposition",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, OrthogonalMatrix::from_trusted(vectors)))
}

fn rotate_columns(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let (mp, mq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * mp - s * mq;
        m[(k, q)] = s * mp + c * mq;
    }
}

fn rotate_rows(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let (mp, mq) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * mp - s * mq;
        m[(q, k)] = s * mp + c * mq;
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// `e^X = V diag(e^λ) Vᵀ`, symmetric positive definite.
pub fn expm_sym(x: &SymMatrix) -> Result<Matrix> {
    let (values, vectors) = eigendecompose(x)?;
    Ok(spectral_function(&values, &vectors, f64::exp))
}

pub(crate) fn spectral_function(
    values: &Vector,
    vectors: &OrthogonalMatrix,
    f: impl Fn(f64) -> f64,
) -> Matrix {
    let v = vectors.as_matrix();
    let d = Matrix::from_diagonal(&values.map(f));
    v * d * v.transpose()
}
