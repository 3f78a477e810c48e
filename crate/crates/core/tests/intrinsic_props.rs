use cartan_core::geometry::{AffineMap, ConvexBody, HPolytope};
use cartan_core::intrinsic_volumes::{
    intrinsic_volume_ball, intrinsic_volume_box, intrinsic_volume_ellipsoid, intrinsic_volumes_ellipsoid,
    steiner_fit,
};
use cartan_core::matrix_group::{sample_haar_orthogonal, Component};
use cartan_core::sampling::{shard_stream, sigma_distance, McPlan};
use cartan_core::Vector;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

// κ-ratio oracle: V_j(rBⁿ) = C(n,j) κ_n / κ_{n−j} rʲ, with κ from Γ.
fn ball_oracle(n: usize, j: usize, r: f64) -> f64 {
    let kappa = |m: usize| std::f64::consts::PI.powf(m as f64 / 2.0) / gamma(m as f64 / 2.0 + 1.0);
    let binom = (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    binom * kappa(n) / kappa(n - j) * r.powi(j as i32)
}

#[test]
fn ball_closed_form_matches_kappa_ratios() {
    for n in 0..=6 {
        for j in 0..=n {
            let got = intrinsic_volume_ball(n, j, 1.0).unwrap();
            let want = ball_oracle(n, j, 1.0);
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "n={n} j={j}");
        }
    }
}

#[test]
fn ellipsoid_with_equal_axes_is_the_ball() {
    for n in 1..=4 {
        for r in [0.3, 1.0, 2.5] {
            let v = intrinsic_volumes_ellipsoid(&vec![r; n]).unwrap();
            for (j, got) in v.iter().enumerate() {
                let want = ball_oracle(n, j, r);
                assert!((got - want).abs() <= 1e-8 * want.max(1.0), "n={n} j={j} r={r}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ellipsoid_volumes_are_homogeneous(
        axes in prop::collection::vec(0.2..4.0f64, 1..=4),
        lambda in 0.1..10.0f64,
    ) {
        let scaled: Vec<f64> = axes.iter().map(|a| a * lambda).collect();
        for j in 0..=axes.len() {
            let base = intrinsic_volume_ellipsoid(&axes, j).unwrap();
            let got = intrinsic_volume_ellipsoid(&scaled, j).unwrap();
            let want = lambda.powi(j as i32) * base;
            prop_assert!((got - want).abs() <= 1e-9 * want.abs());
        }
    }

    #[test]
    fn ellipse_area_is_exact(a in 0.1..5.0f64, b in 0.1..5.0f64) {
        let v = intrinsic_volume_ellipsoid(&[a, b], 2).unwrap();
        prop_assert!((v - std::f64::consts::PI * a * b).abs() <= 1e-8 * v);
    }

    #[test]
    fn box_volumes_are_additive(
        rest in prop::collection::vec(0.2..3.0f64, 0..=3),
        a in 1.0..2.0f64,
        b in 0.1..0.9f64,
        c in 2.1..3.0f64,
    ) {
        // A = [0, a] × R and B = [b, c] × R overlap in [b, a] × R and
        // their union is [0, c] × R.
        let with = |len: f64| -> Vec<f64> {
            let mut s = vec![len];
            s.extend_from_slice(&rest);
            s
        };
        for j in 0..=rest.len() + 1 {
            let lhs = intrinsic_volume_box(&with(c), j).unwrap() + intrinsic_volume_box(&with(a - b), j).unwrap();
            let rhs = intrinsic_volume_box(&with(a), j).unwrap() + intrinsic_volume_box(&with(c - b), j).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }
}

#[test]
fn steiner_fit_is_invariant_under_rigid_motions() {
    let eps: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let square = HPolytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let ellipse = ConvexBody::axis_ellipsoid(Vector::zeros(2), &[1.2, 0.6]).unwrap();
    let mut rng = shard_stream(50, 0);
    for (i, body) in [square, ellipse].iter().enumerate() {
        let k = sample_haar_orthogonal(2, Component::Full, &mut rng);
        let motion = AffineMap::new(k.as_matrix().clone(), Vector::from_vec(vec![3.0, -1.5])).unwrap();
        let moved = body.affine_image(&motion).unwrap();
        let a = steiner_fit(body, &eps, &McPlan::new(200_000, 60 + i as u64)).unwrap();
        let b = steiner_fit(&moved, &eps, &McPlan::new(200_000, 70 + i as u64)).unwrap();
        for j in 0..=2 {
            let z = sigma_distance(a.intrinsic_volumes[j], a.std_errors[j], b.intrinsic_volumes[j], b.std_errors[j]);
            assert!(z < 3.0, "body {i} j={j}: {z} sigma");
        }
    }
}
