//! Computational integral geometry for the affine group `GL(n) ⋉ ℝⁿ`.
//!
//! The crate estimates both sides of the Hadwiger-type kinematic formula in
//! which the non-compact factor `exp(Sym(n))` of the Cartan decomposition
//! `GL(n) = O(n)·exp(Sym(n))` is integrated against the standard Gaussian
//! measure on `Sym(n)`:
//!
//! ```text
//! ∫ φ(M ∩ ḡL) dm(ḡ) = 2 Σⱼ cⱼ φₙ₋ⱼ(M) Vⱼ(L),
//! cⱼ = ∫ Vⱼ(e^X Bⁿ) dγ(X) / Vⱼ(Bⁿ)
//! ```
//!
//! Modules, bottom-up:
//!
//! * [`geometry`]: convex bodies (balls, ellipsoids, H- and V-polytopes),
//!   affine images, intersection and separation predicates, a small
//!   simplex LP and a GJK distance routine.
//! * [`matrix_group`]: `Sym(n)` with its orthonormal basis, Gaussian
//!   sampling, Jacobi eigendecomposition, `exp`, and Haar sampling on `O(n)`.
//! * [`intrinsic_volumes`]: `κⱼ`, closed forms for balls, cubes and
//!   ellipsoids, hit-or-miss volume and the Steiner-polynomial fit.
//! * [`sampling`]: the product measure `ν × γ × λ`, affine flats, and
//!   the shard-deterministic Monte Carlo driver.
//! * [`kinematic`]: kinematic integrals, Crofton coefficients, right-hand
//!   side assembly and the separation-lemma checker.
//! * [`weyl`]: the constants `cⱼ` by direct integration over `Sym(n)` and
//!   by the eigenvalue (Weyl) density.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod intrinsic_volumes;
pub mod kinematic;
pub mod matrix_group;
pub mod sampling;
pub mod weyl;

pub use error::{Error, Result};

/// Column vector in ℝⁿ.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Largest ambient dimension any routine accepts.
pub const MAX_DIM: usize = 6;

pub mod prelude {
    pub use crate::geometry::{AffineMap, BoxRegion, ConvexBody, Halfspace};
    pub use crate::intrinsic_volumes::{
        intrinsic_volume_ball, intrinsic_volume_cube, intrinsic_volume_ellipsoid, kappa,
        steiner_fit, volume_mc, SteinerFit, Valuation,
    };
    pub use crate::kinematic::{
        crofton_coefficient, lhs_kinematic, rhs_hadwiger_gl, separation_lemma_check,
        KinematicGroup, KinematicReport,
    };
    pub use crate::matrix_group::{
        eigendecompose, expm_sym, sample_gaussian_sym, sample_haar_orthogonal, sym_basis,
        Component, OrthogonalMatrix, SymMatrix,
    };
    pub use crate::sampling::{EstimatorResult, McPlan, Stream};
    pub use crate::weyl::{c_direct, c_weyl, z_n, WeylConstants};
    pub use crate::{Matrix, Vector};
}
