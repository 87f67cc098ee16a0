//! Closed-form and reference values for the domains, the regularity
//! estimators and the rescaling experiments.

use hglab_core::benzecri::{cut_disk_rescale, hausdorff_distance, inner_radius, normalize, outer_radius_bound, PointedDomain};
use hglab_core::benzecri::{build_cut_disk, mu_1d, CUT_DISK_ARC};
use hglab_core::domains::{build_disk_pole_hull, build_graph_domain, build_klein_ball, build_simplex};
use hglab_core::groups::{sequence_cartans, GeneratorSet, GroupElement};
use hglab_core::hilbert::Geodesic;
use hglab_core::projlin::{ProjectiveMap, ProjectivePoint, Vector};
use hglab_core::regularity::{boundary_graph_fit, spectral_alpha_beta, AdaptedChart, SupportChoice};
use hglab_core::scenarios::{klein_light_cone, light_cone_boost};

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

fn pt(x: &[f64]) -> ProjectivePoint {
    ProjectivePoint::new(v(x)).unwrap()
}

fn powers(m: ProjectiveMap, n: usize) -> (GeneratorSet, Vec<GroupElement>) {
    let gs = GeneratorSet::new(vec![m]).unwrap();
    let els = (0..=n).map(|k| GroupElement::from_word(&gs, vec![(0, k as i64)])).collect();
    (gs, els)
}

#[test]
fn simplex_faces_have_expected_dimensions() {
    let dom = build_simplex(2, 3).unwrap();
    assert_eq!(dom.face_of(&pt(&[1.0, 0.0, 0.0])).unwrap().dimension, 0);
    assert_eq!(dom.face_of(&pt(&[1.0, 1.0, 0.0])).unwrap().dimension, 1);
    assert_eq!(dom.supporting_hyperplanes(&pt(&[1.0, 0.0, 0.0])).unwrap().len(), 2);
}

#[test]
fn disk_pole_hull_has_two_tangent_segments() {
    let dom = build_disk_pole_hull().unwrap();
    let segs = dom.boundary_segments().unwrap();
    assert_eq!(segs.len(), 2);
    let pole = pt(&[0.0, 1.0, 0.0]);
    for end in [pt(&[1.0, 0.0, 1.0]), pt(&[-1.0, 0.0, 1.0])] {
        assert!(
            segs.iter().any(|s| (s.a.angle(&end) < 1e-6 && s.b.angle(&pole) < 1e-6) || (s.b.angle(&end) < 1e-6 && s.a.angle(&pole) < 1e-6)),
            "no segment from {end:?} to the pole"
        );
    }
    // The pole is a corner: the two tangent lines support it.
    assert_eq!(dom.supporting_hyperplanes(&pole).unwrap().len(), 2);
}

#[test]
fn klein_boost_exponents_are_two() {
    let (gs, els) = powers(light_cone_boost(2f64.ln()).unwrap(), 60);
    let est = spectral_alpha_beta(&sequence_cartans(&gs, &els).unwrap()).unwrap();
    assert!((est.alpha0 - 2.0).abs() < 1e-12 && (est.beta0 - 2.0).abs() < 1e-12, "{est:?}");
}

#[test]
fn klein_boundary_fit_is_two() {
    let dom = klein_light_cone().unwrap();
    let geo = Geodesic::line(&v(&[0.0, 0.0, 1.0]), &v(&[1.0, 0.0, 0.0]), &dom, 0.5).unwrap();
    let chart = AdaptedChart::new(&dom, &geo, &SupportChoice::Unique, 0.5, 1e-7).unwrap();
    let fit = boundary_graph_fit(&chart).unwrap();
    assert!((fit.alpha_hat - 2.0).abs() < 0.05 && (fit.beta_hat - 2.0).abs() < 0.05, "{fit:?}");
}

#[test]
fn graph_domain_fit_recovers_exponent() {
    for p in [1.5, 3.0] {
        let dom = build_graph_domain(p).unwrap();
        let geo = Geodesic::line(&v(&[0.0, 2.0, 1.0]), &v(&[0.0, 0.0, 1.0]), &dom, 0.5).unwrap();
        let support = SupportChoice::Explicit(vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 2.0]);
        let chart = AdaptedChart::new(&dom, &geo, &support, 0.5, 1e-4).unwrap();
        let fit = boundary_graph_fit(&chart).unwrap();
        assert!((fit.alpha_hat - p).abs() < 0.1 && (fit.beta_hat - p).abs() < 0.1, "p = {p}: {fit:?}");
    }
}

#[test]
fn hausdorff_distance_vanishes_on_equal_domains_and_is_symmetric() {
    let (simplex, disk) = (build_simplex(2, 3).unwrap(), build_klein_ball(3).unwrap());
    // Samples lie on the boundary, so only rounding separates a domain from itself.
    assert!(hausdorff_distance(&simplex, &simplex, 200).unwrap().value <= 1e-15);
    let ab = hausdorff_distance(&simplex, &disk, 400).unwrap().value;
    let ba = hausdorff_distance(&disk, &simplex, 400).unwrap().value;
    assert!(ab > 0.1 && (ab - ba).abs() < 1e-12, "{ab} vs {ba}");
}

#[test]
fn normalization_sandwiches_the_image() {
    let dom = build_cut_disk(CUT_DISK_ARC).unwrap();
    let norm = normalize(&PointedDomain::new(dom, pt(&[1.0, 1.0, 1.0])).unwrap()).unwrap();
    assert!((norm.inner - inner_radius(3)).abs() < 1e-15);
    assert!(norm.outer <= outer_radius_bound(3));
    // Renormalizing the image finds the same simplex again.
    let again = normalize(&norm.normalized).unwrap();
    assert!(mu_1d(&again.map).unwrap() < 1e-6);
}

#[test]
fn cut_disk_rescales_to_the_simplex() {
    let report = cut_disk_rescale(&[1.0, 10.0, 100.0, 1e3, 1e4], 400).unwrap();
    let d: Vec<f64> = report.rows.iter().map(|r| r.distance).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[4] < 0.01 && report.converged, "{d:?}");
    let fine = cut_disk_rescale(&[1e4], 800).unwrap().rows[0].distance;
    assert!((fine - d[4]).abs() <= 0.1 * d[4], "{fine} vs {}", d[4]);
}
