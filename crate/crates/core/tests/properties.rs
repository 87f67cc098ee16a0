//! Invariants of the metric, the Cartan projection and the domain kernels.

use hglab_core::domains::{build_klein_ball, build_simplex, convex_hull_2d, ConvexDomain};
use hglab_core::exec::map_indexed;
use hglab_core::hilbert::hil;
use hglab_core::projlin::{cartan, random_orthogonal, Mat, ProjectiveMap, Vector};
use hglab_core::stats::trend_slope;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn positive3() -> impl Strategy<Value = Vector> {
    prop::array::uniform3(-3.0f64..3.0).prop_map(|a| Vector::from_fn(3, |i, _| a[i].exp()))
}

fn disk_point() -> impl Strategy<Value = Vector> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Vector::from_column_slice(&[r * t.cos(), r * t.sin(), 1.0]))
}

fn matrix3() -> impl Strategy<Value = Mat> {
    prop::array::uniform9(-2.0f64..2.0)
        .prop_map(|a| Mat::from_row_slice(3, 3, &a))
        .prop_filter("invertible", |m| m.determinant().abs() > 1e-3)
}

fn metric_axioms(dom: &ConvexDomain, x: &Vector, y: &Vector, z: &Vector) -> Result<(), TestCaseError> {
    let (dxy, dyx) = (hil(dom, x, y).unwrap(), hil(dom, y, x).unwrap());
    let (dxz, dzy) = (hil(dom, x, z).unwrap(), hil(dom, z, y).unwrap());
    prop_assert!(dxy >= 0.0);
    prop_assert!((dxy - dyx).abs() <= 1e-12 * (1.0 + dxy));
    prop_assert!(dxy <= dxz + dzy + 1e-10);
    prop_assert!(hil(dom, x, x).unwrap() == 0.0);
    Ok(())
}

proptest! {
    #[test]
    fn simplex_metric_axioms(x in positive3(), y in positive3(), z in positive3()) {
        metric_axioms(&build_simplex(2, 3).unwrap(), &x, &y, &z)?;
    }

    #[test]
    fn disk_metric_axioms(x in disk_point(), y in disk_point(), z in disk_point()) {
        metric_axioms(&build_klein_ball(3).unwrap(), &x, &y, &z)?;
    }

    #[test]
    fn simplex_distance_is_diagonal_invariant(x in positive3(), y in positive3(), g in positive3()) {
        let dom = build_simplex(2, 3).unwrap();
        let (gx, gy) = (x.component_mul(&g), y.component_mul(&g));
        let (a, b) = (hil(&dom, &x, &y).unwrap(), hil(&dom, &gx, &gy).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }

    #[test]
    fn disk_distance_is_rotation_invariant(x in disk_point(), y in disk_point(), t in 0.0f64..6.3) {
        let dom = build_klein_ball(3).unwrap();
        let r = Mat::from_row_slice(3, 3, &[t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0]);
        let (a, b) = (hil(&dom, &x, &y).unwrap(), hil(&dom, &(&r * &x), &(&r * &y)).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }

    #[test]
    fn cartan_is_orthogonally_invariant(m in matrix3(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, w) = (random_orthogonal(&mut rng, 3), random_orthogonal(&mut rng, 3));
        let a = cartan(&ProjectiveMap::new(m.clone()).unwrap()).unwrap();
        let b = cartan(&ProjectiveMap::new(&u * m * w).unwrap()).unwrap();
        for i in 0..3 {
            prop_assert!((a.mu[i] - b.mu[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn cartan_is_sorted_and_centered(m in matrix3()) {
        let mu = cartan(&ProjectiveMap::new(m).unwrap()).unwrap();
        prop_assert!(mu.mu.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(mu.sum().abs() <= 1e-9);
    }

    #[test]
    fn cartan_of_inverse_is_reversed_negation(m in matrix3()) {
        let g = ProjectiveMap::new(m).unwrap();
        let (a, b) = (cartan(&g).unwrap(), cartan(&g.inverse().unwrap()).unwrap());
        for i in 0..3 {
            prop_assert!((a.mu[i] + b.mu[2 - i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn top_gap_is_subadditive(m in matrix3(), n in matrix3()) {
        let (g, h) = (ProjectiveMap::new(m).unwrap(), ProjectiveMap::new(n).unwrap());
        let gh = cartan(&g.compose(&h)).unwrap();
        let (a, b) = (cartan(&g).unwrap(), cartan(&h).unwrap());
        prop_assert!(gh.mu[0] <= a.mu[0] + b.mu[0] + 1e-9);
    }

    #[test]
    fn hull_contains_its_input(pts in prop::collection::vec(prop::array::uniform2(-10.0f64..10.0), 3..60)) {
        let hull = convex_hull_2d(&pts);
        prop_assume!(hull.len() >= 3);
        for p in &pts {
            for i in 0..hull.len() {
                let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
                let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                prop_assert!(cross >= -1e-9, "point {p:?} right of edge {a:?} -> {b:?}");
            }
        }
    }

    #[test]
    fn map_indexed_preserves_order(n in 0usize..2000) {
        let v = map_indexed(n, |i| 3 * i + 1);
        prop_assert_eq!(v, (0..n).map(|i| 3 * i + 1).collect::<Vec<_>>());
    }

    #[test]
    fn trend_slope_recovers_lines(a in -5.0f64..5.0, b in -5.0f64..5.0, n in 3usize..100) {
        let y: Vec<f64> = (0..n).map(|i| a + b * i as f64).collect();
        prop_assert!((trend_slope(&y).unwrap() - b).abs() <= 1e-9 * (1.0 + b.abs()));
    }
}
