//! Pointed domains, normalization by maximal inscribed simplices and
//! rescaling-limit experiments, measured with the round metric on P(R^d).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{build_simplex, ConvexDomain};
use crate::error::{Error, Result};
use crate::exec;
use crate::hilbert::Geodesic;
use crate::projlin::{cartan, AffineChart, Mat, ProjectiveMap, ProjectivePoint, Vector};

/// A domain with a marked interior point.
#[derive(Debug, Clone)]
pub struct PointedDomain {
    pub domain: ConvexDomain,
    pub point: ProjectivePoint,
}

impl PointedDomain {
    pub fn new(domain: ConvexDomain, point: ProjectivePoint) -> Result<Self> {
        if !domain.is_interior(point.coords()) {
            return Err(Error::NotInterior);
        }
        Ok(Self { domain, point })
    }

    pub fn at_witness(domain: ConvexDomain) -> Self {
        let point = domain.witness_point();
        Self { domain, point }
    }
}

/// Sampled Hausdorff distance in the angle metric between lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainDistance {
    pub value: f64,
    /// Boundary samples used on each side.
    pub samples: [usize; 2],
}

/// Angle between the lines spanned by `a` and `b`.
pub fn line_angle(a: &Vector, b: &Vector) -> f64 {
    let c = a.dot(b).abs();
    let s = if a.len() == 3 {
        a.cross(b).norm()
    } else {
        (a.norm_squared() * b.norm_squared() - c * c).max(0.0).sqrt()
    };
    s.atan2(c)
}

/// Boundary samples as unit vectors; for `d = 3` they are in cyclic order
/// around the witness, so consecutive samples span boundary chords.
pub fn ordered_boundary(dom: &ConvexDomain, samples: usize) -> Vec<Vector> {
    let pts = dom.boundary_samples(samples);
    if dom.dim() != 3 {
        return pts;
    }
    let chart = dom.chart();
    let Some(w) = chart.to_chart_vec(dom.witness()) else {
        return pts;
    };
    let mut keyed: Vec<(f64, Vector)> = pts
        .into_iter()
        .filter_map(|p| {
            let u = chart.to_chart_vec(&p)? - &w;
            let l = chart.lift(&p)?;
            Some((u[1].atan2(u[0]), l.normalize()))
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Vector> = Vec::with_capacity(keyed.len());
    for (_, p) in keyed {
        if out.last().is_none_or(|q| line_angle(q, &p) > 1e-15) {
            out.push(p);
        }
    }
    out
}

/// Angle from the line `a` to the great-circle arc between `b1` and `b2`.
fn arc_distance(a: &Vector, b1: &Vector, b2: &Vector) -> f64 {
    let b2 = if b1.dot(b2) < 0.0 { -b2 } else { b2.clone() };
    let n = b1.cross(&b2);
    let nn = n.norm();
    let ends = line_angle(a, b1).min(line_angle(a, &b2));
    if nn <= 1e-300 {
        return ends;
    }
    let n = n / nn;
    let a = if a.dot(&(b1 + &b2)) < 0.0 { -a } else { a.clone() };
    let p = &a - &n * a.dot(&n);
    if b1.cross(&p).dot(&n) >= 0.0 && p.cross(&b2).dot(&n) >= 0.0 {
        a.dot(&n).abs().min(1.0).asin()
    } else {
        ends
    }
}

/// One-sided sampled excess: the largest angle from a sample of `from`
/// lying outside `to` to the sampled boundary of `to`.
fn excess(from: &[Vector], to_dom: &ConvexDomain, to_inv: &ProjectiveMap, to: &[Vector]) -> f64 {
    let d = to_dom.dim();
    let vals = exec::map_slice(from, |a| {
        if to_dom.margin(&to_inv.apply_vec(a)) >= 0.0 {
            return 0.0;
        }
        if d == 3 && to.len() >= 3 {
            (0..to.len())
                .map(|i| arc_distance(a, &to[i], &to[(i + 1) % to.len()]))
                .fold(f64::INFINITY, f64::min)
        } else {
            to.iter().map(|b| line_angle(a, b)).fold(f64::INFINITY, f64::min)
        }
    });
    vals.into_iter().fold(0.0, f64::max)
}

fn mapped_samples(dom: &ConvexDomain, g: &ProjectiveMap, samples: usize) -> Vec<Vector> {
    ordered_boundary(dom, samples)
        .iter()
        .map(|p| g.apply_vec(p).normalize())
        .collect()
}

/// Hausdorff distance between `g1·d1` and `g2·d2` without rebuilding the
/// images: boundary samples are pushed forward and membership is pulled back.
pub fn hausdorff_distance_mapped(
    d1: &ConvexDomain,
    g1: &ProjectiveMap,
    d2: &ConvexDomain,
    g2: &ProjectiveMap,
    samples: usize,
) -> Result<DomainDistance> {
    if d1.dim() != d2.dim() || g1.dim() != d1.dim() || g2.dim() != d2.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", d1.dim(), d2.dim())));
    }
    let a = mapped_samples(d1, g1, samples);
    let b = mapped_samples(d2, g2, samples);
    let (i1, i2) = (g1.inverse()?, g2.inverse()?);
    let value = excess(&a, d2, &i2, &b).max(excess(&b, d1, &i1, &a));
    Ok(DomainDistance {
        value,
        samples: [a.len(), b.len()],
    })
}

/// Two-sided sampled Hausdorff distance between the closures.
pub fn hausdorff_distance(d1: &ConvexDomain, d2: &ConvexDomain, samples: usize) -> Result<DomainDistance> {
    let id = ProjectiveMap::identity(d1.dim());
    let id2 = ProjectiveMap::identity(d2.dim());
    hausdorff_distance_mapped(d1, &id, d2, &id2, samples)
}

/// Inradius of the standard simplex in the standard chart.
pub fn inner_radius(d: usize) -> f64 {
    1.0 / ((d * (d - 1)) as f64).sqrt()
}

/// Largest accepted outer radius of a normalized domain in the standard chart.
pub fn outer_radius_bound(d: usize) -> f64 {
    (d * d) as f64
}

/// Number of seeded restarts of the inscribed-simplex search.
pub const RESTARTS: usize = 50;
/// Boundary samples per dimension used by the search.
pub const SAMPLES_PER_DIM: usize = 64;
const NORMALIZE_SEED: u64 = 0x5eed_b3c2;

/// Output of [`normalize`]: `g` maps the point to `[1:…:1]` and an inscribed
/// simplex to the standard simplex.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub map: ProjectiveMap,
    pub normalized: PointedDomain,
    /// Chart points of the inscribed simplex vertices.
    pub vertices: Vec<Vector>,
    /// Radius of a ball about the origin of the standard chart inside the image.
    pub inner: f64,
    /// Largest chart norm of the sampled image boundary.
    pub outer: f64,
}

/// Distance from the barycenter in the standard chart `Σ xᵢ = 1`, or `None`
/// when `Σ xᵢ` does not have the sign `side`.
fn standard_chart_radius(p: &Vector, side: f64) -> Option<f64> {
    let s: f64 = p.iter().sum();
    if !(s * side > 0.0) {
        return None;
    }
    let l = p / s;
    let d = p.len() as f64;
    Some(l.iter().map(|x| (x - 1.0 / d).powi(2)).sum::<f64>().sqrt())
}

struct Candidate {
    idx: Vec<usize>,
    /// Smallest barycentric coordinate of the point, or `1 + volume` once
    /// the point is strictly inside.
    score: f64,
}

fn simplex_score(pts: &[Vector], idx: &[usize], p: &Vector) -> f64 {
    let d = p.len();
    let m = Mat::from_fn(d, d, |i, j| pts[idx[j]][i]);
    let det = m.determinant().abs();
    let Some(inv) = m.try_inverse() else {
        return f64::NEG_INFINITY;
    };
    let c = inv * p;
    let s: f64 = c.iter().sum();
    if !(s.abs() > 0.0) {
        return f64::NEG_INFINITY;
    }
    let bmin = c.iter().map(|x| x / s).fold(f64::INFINITY, f64::min);
    if bmin > 0.0 {
        1.0 + det
    } else {
        bmin
    }
}

fn search(pts: &[Vector], p: &Vector, rng: &mut ChaCha8Rng) -> Candidate {
    let d = p.len();
    let n = pts.len();
    let mut idx = vec![rng.random_range(0..n)];
    while idx.len() < d {
        // Farthest point from the affine span of the chosen vertices.
        let basis: Vec<Vector> = idx.iter().map(|&i| pts[i].clone()).collect();
        let q = Mat::from_columns(&basis).qr().q();
        let best = (0..n)
            .filter(|j| !idx.contains(j))
            .max_by(|&a, &b| {
                let ra = (&pts[a] - &q * (q.transpose() * &pts[a])).norm();
                let rb = (&pts[b] - &q * (q.transpose() * &pts[b])).norm();
                ra.total_cmp(&rb)
            })
            .expect("enough samples");
        idx.push(best);
    }
    let mut score = simplex_score(pts, &idx, p);
    loop {
        let mut improved = false;
        for k in 0..d {
            for j in 0..n {
                if idx.contains(&j) {
                    continue;
                }
                let old = idx[k];
                idx[k] = j;
                let s = simplex_score(pts, &idx, p);
                if s > score + 1e-12 * score.abs() {
                    score = s;
                    improved = true;
                } else {
                    idx[k] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Candidate { idx, score }
}

/// Normalizes a pointed domain by a greedy maximal-volume inscribed simplex
/// containing the point.
pub fn normalize(pd: &PointedDomain) -> Result<Normalization> {
    let dom = &pd.domain;
    let d = dom.dim();
    let chart = dom.chart();
    let p = chart
        .lift(pd.point.coords())
        .ok_or(Error::DegenerateDomain("point outside the chart".into()))?;
    let pts: Vec<Vector> = dom
        .boundary_samples(SAMPLES_PER_DIM * d)
        .iter()
        .filter_map(|v| chart.lift(v))
        .collect();
    if pts.len() < d + 1 {
        return Err(Error::DegenerateDomain("too few boundary samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(NORMALIZE_SEED);
    let best = (0..RESTARTS)
        .map(|_| search(&pts, &p, &mut rng))
        .max_by(|a, b| a.score.total_cmp(&b.score))
        .expect("restarts");
    if !(best.score > 1.0) {
        return Err(Error::DegenerateDomain("no inscribed simplex contains the point".into()));
    }
    let v = Mat::from_fn(d, d, |i, j| pts[best.idx[j]][i]);
    let vinv = v.try_inverse().ok_or(Error::DegenerateDomain("flat simplex".into()))?;
    let c = &vinv * &p;
    let scale = Mat::from_diagonal(&Vector::from_iterator(d, c.iter().map(|x| 1.0 / x)));
    let map = ProjectiveMap::normalized(scale * vinv)?;
    let image = dom.transform(&map)?;
    let side = map.apply_vec(&p).sum().signum();
    let outer = pts
        .iter()
        .map(|b| standard_chart_radius(&map.apply_vec(b), side).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    if !(outer <= outer_radius_bound(d)) {
        return Err(Error::DegenerateDomain(format!("outer radius {outer:.3e}")));
    }
    let point = map.apply(&pd.point);
    let normalized = PointedDomain {
        domain: image,
        point,
    };
    Ok(Normalization {
        map,
        normalized,
        vertices: best.idx.iter().map(|&i| pts[i].clone()).collect(),
        inner: inner_radius(d),
        outer,
    })
}

/// Maps `g_t` normalizing the domain at the ray points `ray(t)`.
pub fn normalizing_maps(dom: &ConvexDomain, ray: &Geodesic, ts: &[f64]) -> Result<Vec<ProjectiveMap>> {
    ts.iter()
        .map(|&t| {
            let pd = PointedDomain::new(dom.clone(), ProjectivePoint::new(ray.point_vec(t))?)?;
            Ok(normalize(&pd)?.map)
        })
        .collect()
}

/// Decay factor and absolute threshold of the convergence flag.
pub const CONVERGENCE_DECAY: f64 = 0.1;
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescaleRow {
    pub n: f64,
    pub distance: f64,
    /// Unit-normalized images of the probes.
    pub probes: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescaleReport {
    pub rows: Vec<RescaleRow>,
    /// Final distance below `CONVERGENCE_DECAY ×` the first and below
    /// `CONVERGENCE_THRESHOLD`.
    pub converged: bool,
}

/// Tabulates the distance from `g_n·dom` to `candidate` and the probe images.
pub fn conical_rescale(
    dom: &ConvexDomain,
    maps: &[(f64, ProjectiveMap)],
    candidate: &ConvexDomain,
    probes: &[Vector],
    samples: usize,
) -> Result<RescaleReport> {
    let id = ProjectiveMap::identity(candidate.dim());
    let rows = maps
        .iter()
        .map(|(n, g)| {
            let distance = hausdorff_distance_mapped(dom, g, candidate, &id, samples)?.value;
            let probes = probes
                .iter()
                .map(|p| canonical(&g.apply_vec(p)).iter().copied().collect())
                .collect();
            Ok(RescaleRow { n: *n, distance, probes })
        })
        .collect::<Result<Vec<_>>>()?;
    let converged = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => {
            b.distance < CONVERGENCE_THRESHOLD && (b.distance < CONVERGENCE_DECAY * a.distance || a.distance == 0.0)
        }
        _ => false,
    };
    Ok(RescaleReport { rows, converged })
}

fn canonical(v: &Vector) -> Vector {
    let u = v.normalize();
    match u.iter().find(|x| **x != 0.0) {
        Some(x) if *x < 0.0 => -u,
        _ => u,
    }
}

/// Arc points used for the circular part of the cut disk.
pub const CUT_DISK_ARC: usize = 512;

/// The domain `{xy + yz + zx > 0, x > 0}` containing `[1:1:1]`: in the chart
/// `x + y + z = 1` it is the disk through `e₁, e₂, e₃` cut by the chord
/// `[e₂, e₃]`, sampled along its arc.
pub fn build_cut_disk(arc: usize) -> Result<ConvexDomain> {
    let chart = AffineChart::new(Vector::from_element(3, 1.0))?;
    let c = Vector::from_element(3, 1.0 / 3.0);
    let e = |i: usize| Vector::from_fn(3, |j, _| if i == j { 1.0 } else { 0.0 });
    let (u1, u2) = ((e(1) - &c).normalize(), (e(2) - &c).normalize());
    let w = (&u1 + &u2).normalize();
    let w_perp = (&u1 - &u2).normalize();
    let r = (2.0f64 / 3.0).sqrt();
    // Half-angle subtended by the chord [e₂, e₃].
    let half = (u1.dot(&u2)).acos() / 2.0;
    let mut pts = vec![e(0), e(1), e(2)];
    for i in 1..arc {
        let t = half + (2.0 * std::f64::consts::PI - 2.0 * half) * i as f64 / arc as f64;
        pts.push(&c + (&w * t.cos() + &w_perp * t.sin()) * r);
    }
    ConvexDomain::hull_from_points(chart, &pts, true)
}

/// `diag(n², 1/n, 1/n)`.
pub fn cut_disk_map(n: f64) -> Result<ProjectiveMap> {
    ProjectiveMap::diag(&[n * n, 1.0 / n, 1.0 / n])
}

/// Rescaling of the cut disk towards the standard 2-simplex, with probes `[m]`
/// and the ray base `[e₁ + m]`, `m = e₂ + e₃`.
pub fn cut_disk_rescale(ns: &[f64], samples: usize) -> Result<RescaleReport> {
    let dom = build_cut_disk(CUT_DISK_ARC)?;
    let simplex = build_simplex(2, 3)?;
    let maps = ns
        .iter()
        .map(|&n| Ok((n, cut_disk_map(n)?)))
        .collect::<Result<Vec<_>>>()?;
    let m = Vector::from_column_slice(&[0.0, 1.0, 1.0]);
    let base = Vector::from_column_slice(&[1.0, 1.0, 1.0]);
    conical_rescale(&dom, &maps, &simplex, &[m, base], samples)
}

/// `μ_{1,d}` of a map.
pub fn mu_1d(g: &ProjectiveMap) -> Result<f64> {
    let c = cartan(g)?;
    c.gap(1, g.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::build_klein_ball;

    #[test]
    fn identical_simplices_are_at_distance_zero() {
        let s = build_simplex(2, 3).unwrap();
        assert!(hausdorff_distance(&s, &s, 200).unwrap().value < 1e-6);
    }

    #[test]
    fn example_domain_has_the_marked_boundary() {
        let dom = build_cut_disk(64).unwrap();
        for i in 0..3 {
            let e = Vector::from_fn(3, |j, _| if i == j { 1.0 } else { 0.0 });
            assert!(dom.margin(&e).abs() < 1e-12);
        }
        assert!(dom.is_interior(&Vector::from_column_slice(&[1.0, 1.0, 1.0])));
        assert!(dom.is_interior(&Vector::from_column_slice(&[1.0, 0.5, 0.5])));
    }

    #[test]
    fn normalizing_the_disk_center_satisfies_the_sandwich() {
        let pd = PointedDomain::at_witness(build_klein_ball(3).unwrap());
        let n = normalize(&pd).unwrap();
        assert!(n.outer <= outer_radius_bound(3));
        let img = n.map.apply_vec(pd.point.coords());
        assert!(standard_chart_radius(&img, img.sum().signum()).unwrap() < 1e-9);
    }
}
