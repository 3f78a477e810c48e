use rand::Rng;
use rand_distr::StandardNormal;

use crate::Matrix;

use super::{Component, OrthogonalMatrix};

/// Haar-distributed orthogonal matrix on the requested component.
///
/// QR of an i.i.d. Gaussian matrix, with each column of `Q` multiplied by
/// `sign(r_ii)`; the unadjusted Householder `Q` is not Haar distributed.
pub fn sample_haar_orthogonal<R: Rng + ?Sized>(
    n: usize,
    component: Component,
    rng: &mut R,
) -> OrthogonalMatrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (i, mut col) in q.column_iter_mut().enumerate() {
        if r[(i, i)] < 0.0 {
            col.neg_mut();
        }
    }
    let negative = q.determinant() < 0.0;
    let flip = match component {
        Component::Special => negative,
        Component::Reflection => !negative,
        Component::Full => rng.random::<bool>(),
    };
    if flip {
        q.column_mut(0).neg_mut();
    }
    OrthogonalMatrix::from_trusted(q)
}
