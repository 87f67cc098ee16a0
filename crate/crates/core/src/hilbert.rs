//! Hilbert metric, unit-speed projective geodesics, nearest-point projections
//! and the contraction and slimness diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::domains::{ConvexDomain, Location};
use crate::error::{Error, Result};
use crate::exec;
use crate::projlin::{ProjectivePoint, Vector};

/// Hilbert distance `½ log [a, b; x, y]` between interior points.
pub fn hilbert_distance(dom: &ConvexDomain, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    hil(dom, x.coords(), y.coords())
}

/// Hilbert distance between homogeneous vectors.
pub fn hil(dom: &ConvexDomain, x: &Vector, y: &Vector) -> Result<f64> {
    match dom.chord_params(x, y) {
        Ok((alpha, beta)) => Ok(0.5 * ((1.0 / alpha).ln_1p() + (1.0 / beta).ln_1p())),
        Err(Error::CoincidentPoints) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Hilbert distance on a facet domain from double-double homogeneous
/// coordinates, `½ log (max_i f_i(y)/f_i(x) · max_j f_j(x)/f_j(y))`.
pub(crate) fn facet_hil_dd(facets: &[Vector], x: &[Dd], y: &[Dd]) -> Result<f64> {
    let eval = |f: &Vector, v: &[Dd]| v.iter().zip(f.iter()).fold(dd::zero(), |acc, (a, &b)| acc + *a * b);
    let mut up = dd::zero();
    let mut down = dd::zero();
    for f in facets {
        let (fx, fy) = (eval(f, x), eval(f, y));
        if !(fx.hi() > 0.0) || !(fy.hi() > 0.0) {
            return Err(Error::NotInterior);
        }
        let (r, q) = (dd::div(fy, fx), dd::div(fx, fy));
        if r > up {
            up = r;
        }
        if q > down {
            down = q;
        }
    }
    Ok((0.5 * dd::ln(up * down)).max(0.0))
}

/// Which part of the chord a geodesic covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeodesicKind {
    Segment,
    Ray,
    Line,
}

/// A projective geodesic parameterized by Hilbert arc length.
///
/// The chord endpoints are stored as chart lifts `ã, b̃`; the point at
/// parameter `t` is `w_a ã + w_b b̃` with `w_b / w_a = e^{2(τ0 + t)}`, so
/// points far out along the geodesic keep full relative precision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Geodesic {
    pub kind: GeodesicKind,
    pub a: Vector,
    pub b: Vector,
    pub tau0: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

fn weights(tau: f64) -> (f64, f64) {
    let wa = 1.0 / (1.0 + (2.0 * tau).exp());
    let wb = 1.0 / (1.0 + (-2.0 * tau).exp());
    (wa, wb)
}

impl Geodesic {
    /// Segment `[x, y]`, with `c(0) = x` and `c(hil(x, y)) = y`.
    pub fn through(dom: &ConvexDomain, x: &Vector, y: &Vector) -> Result<Self> {
        let mut g = Self::line_through(dom, x, y)?;
        g.kind = GeodesicKind::Segment;
        g.t_lo = 0.0;
        g.t_hi = hil(dom, x, y)?;
        Ok(g)
    }

    /// Full chord line through `x` and `y`, with `c(0) = x`, oriented from
    /// `x` towards `y`.
    pub fn line_through(dom: &ConvexDomain, x: &Vector, y: &Vector) -> Result<Self> {
        let (alpha, beta) = dom.chord_params(x, y)?;
        let xl = dom.lift(x).ok_or(Error::NotInterior)?;
        let yl = dom.lift(y).ok_or(Error::NotInterior)?;
        let u = &yl - &xl;
        Ok(Self {
            kind: GeodesicKind::Line,
            a: &xl - &u * alpha,
            b: &yl + &u * beta,
            tau0: 0.5 * (alpha / (1.0 + beta)).ln(),
            t_lo: f64::NEG_INFINITY,
            t_hi: f64::INFINITY,
        })
    }

    /// Ray from interior `x` to the boundary point `b`.
    pub fn ray(dom: &ConvexDomain, x: &Vector, b: &Vector) -> Result<Self> {
        if !dom.is_inside(x) {
            return Err(Error::NotInterior);
        }
        if dom.locate_vec(b) != Location::Boundary {
            return Err(Error::EndpointNotBoundary);
        }
        let xl = dom.lift(x).ok_or(Error::NotInterior)?;
        let bl = dom.lift(b).ok_or(Error::EndpointNotBoundary)?;
        let u = &bl - &xl;
        let alpha = dom
            .exit_param(&xl, &(-&u))
            .ok_or(Error::NotProperlyConvex("ray does not exit".into()))?;
        Ok(Self {
            kind: GeodesicKind::Ray,
            a: &xl - &u * alpha,
            b: bl,
            tau0: 0.5 * alpha.ln(),
            t_lo: 0.0,
            t_hi: f64::INFINITY,
        })
    }

    /// Ray from `x` in the chart direction `u` (with `φ(u) = 0`).
    pub fn ray_in_direction(dom: &ConvexDomain, x: &Vector, u: &Vector) -> Result<Self> {
        let xl = dom.lift(x).ok_or(Error::NotInterior)?;
        let beta = dom
            .exit_param(&xl, u)
            .ok_or(Error::NotProperlyConvex("ray does not exit".into()))?;
        let b = &xl + u * beta;
        Self::ray(dom, x, &b)
    }

    /// Line between boundary points `a` and `b` with `c(0)` at the chart
    /// lift combination `(1-s) ã + s b̃`.
    pub fn line(a: &Vector, b: &Vector, dom: &ConvexDomain, s: f64) -> Result<Self> {
        let al = dom.lift(a).ok_or(Error::EndpointNotBoundary)?;
        let bl = dom.lift(b).ok_or(Error::EndpointNotBoundary)?;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::OutOfRange(format!("s = {s}")));
        }
        Ok(Self {
            kind: GeodesicKind::Line,
            a: al,
            b: bl,
            tau0: 0.5 * (s / (1.0 - s)).ln(),
            t_lo: f64::NEG_INFINITY,
            t_hi: f64::INFINITY,
        })
    }

    /// Same geodesic restricted to `[t_lo, t_hi]`.
    pub fn truncated(&self, t_lo: f64, t_hi: f64) -> Self {
        let mut g = self.clone();
        g.t_lo = t_lo.max(self.t_lo);
        g.t_hi = t_hi.min(self.t_hi);
        g
    }

    /// Lift of `c(t)` without range checks.
    pub fn point_vec(&self, t: f64) -> Vector {
        let (wa, wb) = weights(self.tau0 + t);
        &self.a * wa + &self.b * wb
    }

    /// `c(t)`, erroring outside the parameter range.
    pub fn unit_speed(&self, t: f64) -> Result<ProjectivePoint> {
        if t < self.t_lo - 1e-12 || t > self.t_hi + 1e-12 {
            return Err(Error::OutOfRange(format!("t = {t} outside [{}, {}]", self.t_lo, self.t_hi)));
        }
        ProjectivePoint::new(self.point_vec(t))
    }

    pub fn is_finite(&self) -> bool {
        self.t_lo.is_finite() && self.t_hi.is_finite()
    }
}

/// Minimizers of `t ↦ hil(x, c(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub t_lo: f64,
    pub t_hi: f64,
    pub distance: f64,
}

/// Plateau tolerance used to decide which grid values are minimal.
pub const PLATEAU_TOL: f64 = 1e-9;

/// Nearest-point projection of `x` onto a truncated geodesic: grid search at
/// `resolution`, then golden-section refinement of an isolated minimizer or
/// bisection of the ends of a minimizing plateau.
pub fn nearest_point_projection(
    dom: &ConvexDomain,
    geo: &Geodesic,
    x: &Vector,
    resolution: f64,
) -> Result<ProjectionResult> {
    if !geo.is_finite() {
        return Err(Error::Precondition("geodesic must be truncated".into()));
    }
    if !dom.is_inside(x) {
        return Err(Error::NotInterior);
    }
    let f = |t: f64| hil(dom, x, &geo.point_vec(t)).unwrap_or(f64::INFINITY);
    // Sublevel sets of `f` are intervals, so the minimizing set lies within one
    // coarse cell of the coarse minimum plateau.
    let (t_lo, t_hi) = {
        let len = geo.t_hi - geo.t_lo;
        let n = ((len / resolution).ceil() as usize).clamp(2, COARSE_CELLS);
        let ts: Vec<f64> = (0..=n).map(|i| geo.t_lo + len * i as f64 / n as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        let (imin, vmin) = vals
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let mut lo = imin;
        while lo > 0 && vals[lo - 1] <= vmin + PLATEAU_TOL {
            lo -= 1;
        }
        let mut hi = imin;
        while hi < n && vals[hi + 1] <= vmin + PLATEAU_TOL {
            hi += 1;
        }
        (ts[lo.saturating_sub(1)], ts[(hi + 1).min(n)])
    };
    let len = t_hi - t_lo;
    let n = ((len / resolution).ceil() as usize).max(2);
    let ts: Vec<f64> = (0..=n).map(|i| t_lo + len * i as f64 / n as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let (imin, vmin) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let mut lo = imin;
    while lo > 0 && vals[lo - 1] <= vmin + PLATEAU_TOL {
        lo -= 1;
    }
    let mut hi = imin;
    while hi < n && vals[hi + 1] <= vmin + PLATEAU_TOL {
        hi += 1;
    }
    if lo == hi {
        let a = ts[imin.saturating_sub(1)];
        let b = ts[(imin + 1).min(n)];
        let (t, v) = golden_min(&f, a, b, 80);
        let (t, v) = if v <= vmin { (t, v) } else { (ts[imin], vmin) };
        return Ok(ProjectionResult {
            t_lo: t,
            t_hi: t,
            distance: v,
        });
    }
    let inside = |t: f64| f(t) <= vmin + PLATEAU_TOL;
    let left = if lo == 0 { ts[0] } else { bisect_edge(&inside, ts[lo - 1], ts[lo]) };
    let right = if hi == n { ts[n] } else { bisect_edge(&inside, ts[hi + 1], ts[hi]) };
    Ok(ProjectionResult {
        t_lo: left,
        t_hi: right,
        distance: vmin,
    })
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Boundary between `out` (predicate false) and `inn` (predicate true).
fn bisect_edge(pred: &dyn Fn(f64) -> bool, mut out: f64, mut inn: f64) -> f64 {
    for _ in 0..60 {
        let m = 0.5 * (out + inn);
        if pred(m) {
            inn = m;
        } else {
            out = m;
        }
    }
    inn
}

/// Default projection grid resolution.
pub const DEFAULT_RESOLUTION: f64 = 0.02;
/// Cells of the coarse pass of the nearest point search.
const COARSE_CELLS: usize = 64;

/// Sampled two-sided Hausdorff distance between two truncated geodesics.
pub fn hausdorff_distance_geodesics(dom: &ConvexDomain, g1: &Geodesic, g2: &Geodesic, samples: usize) -> Result<f64> {
    let one_sided = |p: &Geodesic, q: &Geodesic| -> Result<f64> {
        let n = samples.max(2);
        let ds = exec::map_indexed(n, |i| {
            let t = p.t_lo + (p.t_hi - p.t_lo) * i as f64 / (n - 1) as f64;
            nearest_point_projection(dom, q, &p.point_vec(t), DEFAULT_RESOLUTION).map(|r| r.distance)
        });
        ds.into_iter().try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
    };
    Ok(one_sided(g1, g2)?.max(one_sided(g2, g1)?))
}

/// How contraction balls are chosen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BallSampler {
    /// Random centers in the domain at Hilbert distance more than
    /// `radius + margin` from the geodesic.
    Random {
        seed: u64,
        count: usize,
        radius: f64,
        /// Largest fraction of the way to the boundary for candidate centers.
        max_fraction: f64,
    },
    Explicit(Vec<(Vec<f64>, f64)>),
}

/// Outcome of one ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallProjection {
    pub center: Vec<f64>,
    pub radius: f64,
    pub distance_to_geodesic: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionReport {
    pub max_projection_diameter: f64,
    pub witness: Option<BallProjection>,
    pub balls: Vec<BallProjection>,
    pub truncation: (f64, f64),
}

/// Disjointness margin between a ball and the geodesic.
pub const BALL_MARGIN: f64 = 1e-3;

/// Point on the chart ray from `c(t)` in direction `u` (with `φ(u) = 0`)
/// whose distance to the truncated geodesic is `distance`.
pub fn offset_center(dom: &ConvexDomain, geo: &Geodesic, t: f64, u: &Vector, distance: f64) -> Result<Vector> {
    let base = dom.lift(&geo.point_vec(t)).ok_or(Error::NotInterior)?;
    let exit = dom
        .exit_param(&base, u)
        .ok_or(Error::NotProperlyConvex("offset ray does not exit".into()))?;
    let at = |s: f64| &base + u * s;
    let gap = |s: f64| -> Result<f64> { Ok(nearest_point_projection(dom, geo, &at(s), DEFAULT_RESOLUTION)?.distance - distance) };
    let (mut lo, mut hi) = (0.0, exit);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if !dom.is_inside(&at(mid)) || gap(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if gap(lo)?.abs() > 1e-6 * distance.max(1.0) && gap(hi).map(|g| g.abs()).unwrap_or(f64::INFINITY) > 1e-6 * distance.max(1.0) {
        return Err(Error::OutOfRange(format!("no point at distance {distance}")));
    }
    Ok(at(lo))
}

/// Number of boundary directions sampled on a ball of radius `r`.
pub fn ball_directions(d: usize, r: f64) -> usize {
    let base = if d <= 3 { 64 } else { 256 };
    base * (r.ceil().max(1.0) as usize)
}

/// Points at Hilbert distance `r` from `center` along evenly spread chart
/// directions.
pub fn ball_boundary(dom: &ConvexDomain, center: &Vector, r: f64, count: usize) -> Vec<Vector> {
    let d = dom.dim();
    let c = dom.lift(center).expect("interior center");
    let phi = dom.chart().phi().clone();
    let frame = dom.chart().frame();
    let basis: Vec<Vector> = (0..d - 1).map(|j| frame.column(j).into_owned()).collect();
    let dirs: Vec<Vector> = if d == 3 {
        (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / count as f64;
                &basis[0] * t.cos() + &basis[1] * t.sin()
            })
            .collect()
    } else {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        (0..count)
            .map(|i| {
                basis.iter().enumerate().fold(Vector::zeros(d), |acc, (k, b)| {
                    acc + b * ((i as f64 + 0.5) * golden.powi(k as i32 + 1) * std::f64::consts::TAU).sin()
                })
            })
            .collect()
    };
    let _ = phi;
    dirs.iter()
        .filter_map(|u| {
            let g = Geodesic::ray_in_direction(dom, &c, u).ok()?;
            Some(g.point_vec(r))
        })
        .collect()
}

/// Projection diameters of balls disjoint from a truncated geodesic.
pub fn contraction_profile(dom: &ConvexDomain, geo: &Geodesic, sampler: &BallSampler) -> Result<ContractionReport> {
    if !geo.is_finite() {
        return Err(Error::Precondition("geodesic must be truncated".into()));
    }
    let balls: Vec<(Vector, f64)> = match sampler {
        BallSampler::Explicit(list) => {
            let mut out = Vec::new();
            for (c, r) in list {
                let c = Vector::from_column_slice(c);
                let dist = nearest_point_projection(dom, geo, &c, DEFAULT_RESOLUTION)?.distance;
                if dist <= r + BALL_MARGIN {
                    return Err(Error::SamplerProducedIntersectingBall);
                }
                out.push((c, *r));
            }
            out
        }
        BallSampler::Random {
            seed,
            count,
            radius,
            max_fraction,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut out = Vec::new();
            let mut attempts = 0usize;
            while out.len() < *count {
                attempts += 1;
                if attempts > 200 * count.max(&1) {
                    return Err(Error::Precondition("could not place disjoint balls".into()));
                }
                let c = dom.random_interior(&mut rng, *max_fraction);
                let dist = nearest_point_projection(dom, geo, &c, DEFAULT_RESOLUTION)?.distance;
                if dist > radius + BALL_MARGIN {
                    out.push((c, *radius));
                }
            }
            out
        }
    };
    let results = exec::map_slice(&balls, |(c, r)| -> Result<BallProjection> {
        let n = ball_directions(dom.dim(), *r);
        let mut pts = ball_boundary(dom, c, *r, n);
        pts.push(c.clone());
        let mut tmin = f64::INFINITY;
        let mut tmax = f64::NEG_INFINITY;
        for p in &pts {
            let pr = nearest_point_projection(dom, geo, p, DEFAULT_RESOLUTION)?;
            tmin = tmin.min(pr.t_lo);
            tmax = tmax.max(pr.t_hi);
        }
        let dist = nearest_point_projection(dom, geo, c, DEFAULT_RESOLUTION)?.distance;
        Ok(BallProjection {
            center: c.iter().copied().collect(),
            radius: *r,
            distance_to_geodesic: dist,
            t_min: tmin,
            t_max: tmax,
            diameter: tmax - tmin,
        })
    });
    let balls: Vec<BallProjection> = results.into_iter().collect::<Result<_>>()?;
    let witness = balls
        .iter()
        .fold(None::<&BallProjection>, |acc, b| match acc {
            Some(a) if a.diameter >= b.diameter => Some(a),
            _ => Some(b),
        })
        .cloned();
    Ok(ContractionReport {
        max_projection_diameter: witness.as_ref().map(|w| w.diameter).unwrap_or(0.0),
        witness,
        balls,
        truncation: (geo.t_lo, geo.t_hi),
    })
}

/// How slimness triangles are chosen: `x = c(s)`, `y = c(t)` on the
/// geodesic and an interior apex `z`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TriangleSampler {
    Random {
        seed: u64,
        count: usize,
        max_fraction: f64,
    },
    Explicit(Vec<(f64, f64, Vec<f64>)>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleResult {
    pub s: f64,
    pub t: f64,
    pub apex: Vec<f64>,
    pub required_r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlimnessReport {
    pub max_required_delta: f64,
    pub witness: Option<TriangleResult>,
    pub triangles: Vec<TriangleResult>,
}

/// Distance from `p` to the segment `[x, z]`.
fn distance_to_segment(dom: &ConvexDomain, x: &Vector, z: &Vector, p: &Vector) -> Result<f64> {
    if hil(dom, x, z)? < 1e-12 {
        return hil(dom, x, p);
    }
    let seg = Geodesic::through(dom, x, z)?;
    Ok(nearest_point_projection(dom, &seg, p, DEFAULT_RESOLUTION)?.distance)
}

/// Smallest `r` with `[x,y] ⊂ N_r([x,z]) ∪ N_r([z,y])` on a sampled `[x,y]`.
pub fn required_slimness(dom: &ConvexDomain, x: &Vector, y: &Vector, z: &Vector, samples: usize) -> Result<f64> {
    let seg = Geodesic::through(dom, x, y)?;
    let mut worst: f64 = 0.0;
    for i in 0..=samples {
        let t = seg.t_hi * i as f64 / samples as f64;
        let p = seg.point_vec(t);
        let d1 = distance_to_segment(dom, x, z, &p)?;
        let d2 = distance_to_segment(dom, z, y, &p)?;
        worst = worst.max(d1.min(d2));
    }
    Ok(worst)
}

/// Slimness of triangles with one side on a truncated geodesic.
pub fn slimness_profile(dom: &ConvexDomain, geo: &Geodesic, sampler: &TriangleSampler) -> Result<SlimnessReport> {
    if !geo.is_finite() {
        return Err(Error::Precondition("geodesic must be truncated".into()));
    }
    let tris: Vec<(f64, f64, Vector)> = match sampler {
        TriangleSampler::Explicit(v) => v.iter().map(|(s, t, z)| (*s, *t, Vector::from_column_slice(z))).collect(),
        TriangleSampler::Random {
            seed,
            count,
            max_fraction,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count)
                .map(|_| {
                    let s = rng.random_range(geo.t_lo..geo.t_hi);
                    let t = rng.random_range(geo.t_lo..geo.t_hi);
                    let z = dom.random_interior(&mut rng, *max_fraction);
                    (s.min(t), s.max(t), z)
                })
                .collect()
        }
    };
    let results = exec::map_slice(&tris, |(s, t, z)| -> Result<TriangleResult> {
        let x = geo.point_vec(*s);
        let y = geo.point_vec(*t);
        let r = if t - s < 1e-9 { 0.0 } else { required_slimness(dom, &x, &y, z, 48)? };
        Ok(TriangleResult {
            s: *s,
            t: *t,
            apex: z.iter().copied().collect(),
            required_r: r,
        })
    });
    let triangles: Vec<TriangleResult> = results.into_iter().collect::<Result<_>>()?;
    let witness = triangles
        .iter()
        .fold(None::<&TriangleResult>, |acc, b| match acc {
            Some(a) if a.required_r >= b.required_r => Some(a),
            _ => Some(b),
        })
        .cloned();
    Ok(SlimnessReport {
        max_required_delta: witness.as_ref().map(|w| w.required_r).unwrap_or(0.0),
        witness,
        triangles,
    })
}

/// Whether `hil(w1, w2) = hil(w1, w3) + hil(w3, w2)` within `1e-8`.
pub fn geodesic_collinearity_check(dom: &ConvexDomain, w1: &Vector, w2: &Vector, w3: &Vector) -> Result<bool> {
    let lhs = hil(dom, w1, w2)?;
    let rhs = hil(dom, w1, w3)? + hil(dom, w3, w2)?;
    Ok((lhs - rhs).abs() <= 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{build_klein_ball, build_simplex};

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn klein_radius_half() {
        let k = build_klein_ball(3).unwrap();
        let d = hil(&k, &v(&[0., 0., 1.]), &v(&[0.5, 0., 1.])).unwrap();
        assert!((d - 0.5f64.atanh()).abs() < 1e-12);
        assert_eq!(hil(&k, &v(&[0.1, 0.2, 1.]), &v(&[0.1, 0.2, 1.])).unwrap(), 0.0);
    }

    #[test]
    fn simplex_log_two() {
        let s = build_simplex(2, 3).unwrap();
        let d = hil(&s, &v(&[1., 1., 1.]), &v(&[2., 1., 0.5])).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn unit_speed_on_axis() {
        let k = build_klein_ball(3).unwrap();
        let g = Geodesic::ray(&k, &v(&[0., 0., 1.]), &v(&[1., 0., 1.])).unwrap();
        let p = g.unit_speed(1.0).unwrap();
        let c = k.chart().to_chart(&p).unwrap();
        assert!((c[0] - 1f64.tanh()).abs() < 1e-12 && c[1].abs() < 1e-15);
        assert!(g.unit_speed(-1.0).is_err());
        let d = hil(&k, &g.point_vec(0.3), &g.point_vec(2.2)).unwrap();
        assert!((d - 1.9).abs() < 1e-10);
    }

    #[test]
    fn projection_foot_of_perpendicular() {
        let k = build_klein_ball(3).unwrap();
        let g = Geodesic::line(&v(&[-1., 0., 1.]), &v(&[1., 0., 1.]), &k, 0.5)
            .unwrap()
            .truncated(-3.0, 3.0);
        let r = nearest_point_projection(&k, &g, &v(&[0., 0.5, 1.]), DEFAULT_RESOLUTION).unwrap();
        assert!(r.t_lo.abs() < 1e-6 && r.t_hi.abs() < 1e-6);
        assert!((r.distance - 0.5f64.atanh()).abs() < 1e-9);
    }
}
