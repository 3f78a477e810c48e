use cartan_core::geometry::lp::{LinearProgram, LpStatus};
use cartan_core::geometry::{intersect_hrep, separating_hyperplane, AffineMap, ConvexBody, HPolytope};
use cartan_core::kinematic::random_polygon;
use cartan_core::sampling::shard_stream;
use cartan_core::{Matrix, Vector};
use proptest::prelude::*;
use rand::Rng;

fn probe_points(seed: u64, n: usize, count: usize, half_width: f64) -> Vec<Vector> {
    let mut rng = shard_stream(seed, 0);
    (0..count)
        .map(|_| Vector::from_fn(n, |_, _| rng.random_range(-half_width..half_width)))
        .collect()
}

fn box_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-1.0..1.0f64, 2), prop::collection::vec(0.2..1.5f64, 2))
        .prop_map(|(lo, w)| {
            let hi = lo.iter().zip(&w).map(|(a, b)| a + b).collect();
            (lo, hi)
        })
}

// Outward edge inequalities of a counter-clockwise polygon.
fn edge_rows(hull: &[Vector]) -> Vec<(f64, f64, f64)> {
    (0..hull.len())
        .map(|i| {
            let a = &hull[i];
            let b = &hull[(i + 1) % hull.len()];
            let (nx, ny) = (b[1] - a[1], a[0] - b[0]);
            let len = nx.hypot(ny);
            (nx / len, ny / len, (nx * a[0] + ny * a[1]) / len)
        })
        .collect()
}

fn ccw_hull(body: &ConvexBody) -> Vec<Vector> {
    match body {
        ConvexBody::VPolytope(v) => v.hull_2d().unwrap().to_vec(),
        _ => panic!("expected a polygon"),
    }
}

// Largest inscribed slack of the common constraints; positive iff the
// polygons share an interior point.
fn common_interior_slack(a: &ConvexBody, b: &ConvexBody) -> f64 {
    let mut lp = LinearProgram::free(3);
    lp.maximize(vec![0.0, 0.0, 1.0]);
    lp.le(vec![0.0, 0.0, 1.0], 1.0);
    for (nx, ny, c) in edge_rows(&ccw_hull(a)).into_iter().chain(edge_rows(&ccw_hull(b))) {
        lp.le(vec![nx, ny, 1.0], c);
    }
    match lp.solve().unwrap() {
        LpStatus::Optimal { value, .. } => value,
        LpStatus::Infeasible => f64::NEG_INFINITY,
        LpStatus::Unbounded => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn intersection_membership_is_conjunction((lo_a, hi_a) in box_strategy(), (lo_b, hi_b) in box_strategy(), seed in 0u64..1000) {
        let a = HPolytope::cuboid(&lo_a, &hi_a).unwrap();
        let b = HPolytope::cuboid(&lo_b, &hi_b).unwrap();
        if let Some(c) = intersect_hrep(&a, &b).unwrap() {
            for x in probe_points(seed, 2, 1000, 2.5) {
                let both = a.contains(&x).unwrap() && b.contains(&x).unwrap();
                prop_assert_eq!(c.contains(&x).unwrap(), both);
            }
        }
    }

    #[test]
    fn affine_image_preserves_membership(
        entries in prop::collection::vec(-2.0..2.0f64, 4),
        shift in prop::collection::vec(-3.0..3.0f64, 2),
        seed in 0u64..1000,
    ) {
        let a = Matrix::from_row_slice(2, 2, &entries);
        prop_assume!(a.determinant().abs() > 0.05);
        let f = AffineMap::new(a, Vector::from_vec(shift)).unwrap();
        let bodies = [
            ConvexBody::unit_ball(2),
            ConvexBody::axis_ellipsoid(Vector::from_vec(vec![0.3, -0.2]), &[1.5, 0.5]).unwrap(),
            HPolytope::cuboid(&[-1.0, -0.5], &[0.5, 1.0]).unwrap(),
            ConvexBody::polygon(&[(0.0, 0.0), (1.0, 0.2), (0.4, 1.1)]).unwrap(),
        ];
        for body in &bodies {
            let image = body.affine_image(&f).unwrap();
            for x in probe_points(seed, 2, 200, 1.6) {
                // Skip points so close to the boundary that rounding decides.
                let d = body.distance_to_point(&x);
                let inside = body.contains(&x).unwrap();
                if !inside && d < 1e-6 {
                    continue;
                }
                prop_assert_eq!(image.contains(&f.apply(&x)).unwrap(), inside);
            }
        }
    }

    #[test]
    fn diameter_is_translation_invariant_and_homogeneous(
        lambda in 0.1..5.0f64,
        shift in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let t = Vector::from_vec(shift);
        let bodies = [
            ConvexBody::unit_ball(3),
            ConvexBody::axis_ellipsoid(Vector::zeros(3), &[2.0, 0.5, 1.0]).unwrap(),
            HPolytope::cuboid(&[0.0, 0.0, 0.0], &[1.0, 2.0, 0.5]).unwrap(),
        ];
        for body in &bodies {
            let base = body.diameter().value;
            let moved = body.scale(lambda).unwrap().translate(&t).unwrap().diameter().value;
            prop_assert!((moved - lambda * base).abs() <= 1e-9 * (1.0 + lambda * base));
        }
    }
}

#[test]
fn separation_matches_common_interior_lp_on_random_polygons() {
    let mut rng = shard_stream(41, 0);
    let mut separated = 0;
    for _ in 0..500 {
        let a = random_polygon(&mut rng).unwrap();
        let shift = Vector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
        let b = random_polygon(&mut rng).unwrap().translate(&shift).unwrap();
        let slack = common_interior_slack(&a, &b);
        if slack.abs() < 1e-7 {
            continue;
        }
        let sep = separating_hyperplane(&a, &b).unwrap();
        assert_eq!(sep.is_none(), slack > 0.0, "slack {slack}");
        separated += usize::from(sep.is_some());
    }
    assert!(separated > 50 && separated < 450);
}
