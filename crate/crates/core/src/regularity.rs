//! Boundary regularity exponents from boundary-local fits and from ratios of
//! singular value gaps, and the uniform regularity statistics.

use serde::{Deserialize, Serialize};

use crate::domains::ConvexDomain;
use crate::error::{Error, Result};
use crate::exec;
use crate::groups::{quotient_cartans, GeneratorSet, GroupElement};
use crate::hilbert::Geodesic;
use crate::projlin::{CartanVector, ProjectivePoint, Vector};
use crate::stats::{ols, trend_slope};

fn slope_of(y: &[f64]) -> f64 {
    trend_slope(y).unwrap_or(0.0)
}

/// How the supporting hyperplanes at the two endpoints are chosen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SupportChoice {
    /// Require a unique support at each endpoint.
    Unique,
    /// Covectors `(η₊, η₋)` of the supports at `c(+∞)` and `c(-∞)`.
    Explicit(Vec<f64>, Vec<f64>),
}

/// One tabulated point of the boundary graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSample {
    /// Index of the direction in `W₀`.
    pub direction: usize,
    /// Euclidean norm of `x` in the orthonormal `W₀` coordinates.
    pub r: f64,
    /// `f(x)`; zero when the vertical line meets the boundary at `H₊`.
    pub f: f64,
    /// Height `h(x)`, infinite where `f(x) = 0`.
    pub h: f64,
}

/// Coordinates `Ψ(v) = [v + v₊]` on `W₋` adapted to a bi-infinite geodesic,
/// with the boundary graph `f` tabulated on a log-spaced radial grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptedChart {
    pub geodesic: Geodesic,
    pub eta_plus: Vector,
    pub eta_minus: Vector,
    pub v_plus: Vector,
    pub v_minus: Vector,
    /// Orthonormal basis of `W₀ = ker η₊ ∩ ker η₋`.
    pub w0: Vec<Vector>,
    /// Unit directions in `W₀` used for the grid.
    pub directions: Vec<Vector>,
    pub samples: Vec<GraphSample>,
    pub r_max: f64,
    pub r_min: f64,
}

/// Grid points per factor of two in radius.
pub const GRID_PER_OCTAVE: usize = 8;

fn orthonormal_complement(rows: &[Vector], d: usize) -> Vec<Vector> {
    let m = crate::projlin::Mat::from_fn(d, d, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.max();
    (0..d)
        .filter(|&k| svd.singular_values[k] <= 1e-12 * top)
        .map(|k| vt.row(k).transpose())
        .collect()
}

impl AdaptedChart {
    /// Builds the chart for a geodesic whose chord endpoints are its
    /// endpoints at infinity, and tabulates `f` for radii in
    /// `[r_min, r_max]`.
    pub fn new(dom: &ConvexDomain, geo: &Geodesic, support: &SupportChoice, r_max: f64, r_min: f64) -> Result<Self> {
        let d = dom.dim();
        if d < 3 {
            return Err(Error::BadDimensions("adapted charts need d ≥ 3".into()));
        }
        let v_plus = geo.b.normalize();
        let v_minus = geo.a.normalize();
        for v in [&v_plus, &v_minus] {
            if dom.locate_vec(v) != crate::domains::Location::Boundary {
                return Err(Error::EndpointNotBoundary);
            }
        }
        let (eta_plus, eta_minus) = match support {
            SupportChoice::Unique => {
                let pick = |v: &Vector| -> Result<Vector> {
                    let hs = dom.supporting_hyperplanes(&ProjectivePoint::new(v.clone())?)?;
                    if hs.len() != 1 {
                        return Err(Error::NonUniqueSupportRequired);
                    }
                    Ok(hs[0].covector().clone())
                };
                (pick(&v_plus)?, pick(&v_minus)?)
            }
            SupportChoice::Explicit(p, m) => {
                if p.len() != d || m.len() != d {
                    return Err(Error::DimensionMismatch("support covectors".into()));
                }
                (Vector::from_column_slice(p), Vector::from_column_slice(m))
            }
        };
        let tol = 1e-9;
        if eta_plus.dot(&v_plus).abs() > tol * eta_plus.norm() || eta_minus.dot(&v_minus).abs() > tol * eta_minus.norm() {
            return Err(Error::Precondition("supports must pass through the endpoints".into()));
        }
        let eta_plus = if eta_plus.dot(&v_minus) < 0.0 { -eta_plus } else { eta_plus };
        let eta_minus = if eta_minus.dot(&v_plus) < 0.0 { -eta_minus } else { eta_minus };
        if eta_plus.dot(&v_minus).abs() <= tol || eta_minus.dot(&v_plus).abs() <= tol {
            return Err(Error::Precondition("each support must miss the opposite endpoint".into()));
        }
        let w0 = orthonormal_complement(&[eta_plus.clone(), eta_minus.clone()], d);
        let mut directions = Vec::new();
        for b in &w0 {
            directions.push(b.clone());
            directions.push(-b);
        }
        if w0.len() >= 2 {
            for i in 0..w0.len() {
                for j in (i + 1)..w0.len() {
                    for (s, t) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        directions.push((&w0[i] * s + &w0[j] * t).normalize());
                    }
                }
            }
        }
        let mut chart = Self {
            geodesic: geo.clone(),
            eta_plus,
            eta_minus,
            v_plus,
            v_minus,
            w0,
            directions,
            samples: Vec::new(),
            r_max,
            r_min,
        };
        let octaves = (r_max / r_min).log2().ceil().max(1.0) as usize;
        let count = octaves * GRID_PER_OCTAVE;
        let jobs: Vec<(usize, f64)> = (0..chart.directions.len())
            .flat_map(|k| (0..=count).map(move |i| (k, r_max * 2f64.powf(-(i as f64) / GRID_PER_OCTAVE as f64))))
            .collect();
        let samples = exec::map_slice(&jobs, |&(k, r)| {
            let x = &chart.directions[k] * r;
            let f = chart.graph_value(dom, &x);
            f.map(|f| GraphSample {
                direction: k,
                r,
                f,
                h: chart.height_of(f),
            })
        });
        chart.samples = samples.into_iter().collect::<Result<_>>()?;
        Ok(chart)
    }

    /// `Ψ(x + y v₋)` as a homogeneous vector.
    pub fn psi(&self, x: &Vector, y: f64) -> Vector {
        &self.v_plus + x + &self.v_minus * y
    }

    /// `f(x)`: the `y > 0` at which the vertical line through `x` enters the
    /// domain, located by bisection in `log y` on the exact membership sign.
    pub fn graph_value(&self, dom: &ConvexDomain, x: &Vector) -> Result<f64> {
        let inside = |y: f64| dom.is_inside(&self.psi(x, y));
        let mut best: Option<(f64, f64)> = None;
        for e in -40..=40 {
            let y = 2f64.powi(e);
            let m = dom.margin(&self.psi(x, y));
            if m > 0.0 && best.is_none_or(|b| m > b.1) {
                best = Some((y, m));
            }
        }
        let Some((mut hi, _)) = best else {
            return Err(Error::Precondition("vertical line misses the domain; shrink r_max".into()));
        };
        let mut lo = hi;
        loop {
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok(0.0);
            }
            if !inside(lo) {
                break;
            }
            hi = lo;
        }
        let (mut a, mut b) = (lo.ln(), hi.ln());
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if inside(m.exp()) {
                b = m;
            } else {
                a = m;
            }
        }
        Ok((0.5 * (a + b)).exp())
    }

    /// `h = t` of the point `c(t) = H_y ∩ c(ℝ)`, which is `-½ log f - τ₀` for
    /// the stored endpoint lifts.
    pub fn height_of(&self, f: f64) -> f64 {
        if f <= 0.0 {
            return f64::INFINITY;
        }
        let kb = self.geodesic.b.norm();
        let ka = self.geodesic.a.norm();
        -0.5 * (f * kb / ka).ln() - self.geodesic.tau0
    }

    /// Samples along one direction ordered by decreasing radius.
    pub fn ray_samples(&self, direction: usize) -> Vec<&GraphSample> {
        self.samples.iter().filter(|s| s.direction == direction).collect()
    }

    /// Discrete convexity of `f` along each grid direction (including the
    /// origin) within `tol`.
    pub fn is_convex_on_grid(&self, tol: f64) -> bool {
        (0..self.directions.len()).all(|k| {
            let mut pts: Vec<(f64, f64)> = self.ray_samples(k).iter().map(|s| (s.r, s.f)).collect();
            pts.push((0.0, 0.0));
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.windows(3).all(|w| {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                let (x2, y2) = w[2];
                let interp = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
                y1 <= interp + tol
            })
        })
    }
}

/// Slopes of `log f` against `log r` over dyadic annuli.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryFit {
    /// Smallest anchored secant slope over the deep annuli.
    pub alpha_hat: f64,
    /// Largest anchored secant slope over the deep annuli.
    pub beta_hat: f64,
    /// Extremes of the per-annulus regression slopes.
    pub local_min: f64,
    pub local_max: f64,
    /// `(direction, j, slope)` for each annulus `2^{-j-1} < r/r_max ≤ 2^{-j}`.
    pub slopes: Vec<(usize, usize, f64)>,
    /// `(direction, j, secant)` from the first annulus to annulus `j`.
    pub secants: Vec<(usize, usize, f64)>,
}

/// First dyadic annulus used by boundary fits.
pub const FIRST_ANNULUS: usize = 3;

/// Per-annulus least squares of `log f` against `log r`. Each annulus is
/// summarized by its fitted value at the central radius; `α` and `β` are
/// the extreme secant slopes from the first annulus to the annuli in the
/// deeper half of the range, which tend to the lower and upper limits of
/// `log f / log r` even when the local slope oscillates.
pub fn boundary_graph_fit(chart: &AdaptedChart) -> Result<BoundaryFit> {
    let octaves = (chart.r_max / chart.r_min).log2().floor() as usize;
    let mut slopes = Vec::new();
    let mut secants = Vec::new();
    let deep = (FIRST_ANNULUS + octaves).div_ceil(2);
    for k in 0..chart.directions.len() {
        let samples = chart.ray_samples(k);
        let mut anchor: Option<(f64, f64)> = None;
        for j in FIRST_ANNULUS..octaves {
            let hi = chart.r_max * 2f64.powi(-(j as i32));
            let lo = hi / 2.0;
            let pts: Vec<&&GraphSample> = samples.iter().filter(|s| s.r > lo * (1.0 + 1e-12) && s.r <= hi * (1.0 + 1e-12)).collect();
            if pts.len() < 3 {
                continue;
            }
            if pts.iter().any(|s| s.f == 0.0) {
                slopes.push((k, j, f64::INFINITY));
                if j >= deep {
                    secants.push((k, j, f64::INFINITY));
                }
                continue;
            }
            let x: Vec<f64> = pts.iter().map(|s| s.r.ln()).collect();
            let y: Vec<f64> = pts.iter().map(|s| s.f.ln()).collect();
            let Some((m, c)) = ols(&x, &y) else { continue };
            slopes.push((k, j, m));
            let xc = (hi / std::f64::consts::SQRT_2).ln();
            let yc = c + m * xc;
            match anchor {
                None => anchor = Some((xc, yc)),
                Some((x0, y0)) if j >= deep => secants.push((k, j, (yc - y0) / (xc - x0))),
                Some(_) => {}
            }
        }
    }
    let annuli = slopes.iter().map(|s| s.1).collect::<std::collections::BTreeSet<_>>().len();
    if annuli < 4 || secants.is_empty() {
        return Err(Error::InsufficientScales(format!("{annuli} annuli")));
    }
    let min = |v: &[(usize, usize, f64)]| v.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let max = |v: &[(usize, usize, f64)]| v.iter().map(|s| s.2).fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundaryFit {
        alpha_hat: min(&secants),
        beta_hat: max(&secants),
        local_min: min(&slopes),
        local_max: max(&slopes),
        slopes,
        secants,
    })
}

/// Tail window `[⌊N/2⌋, N]` over a sequence of length `N + 1`.
pub fn tail_window(len: usize) -> (usize, usize) {
    let n = len.saturating_sub(1);
    (n / 2, n)
}

/// Spectral exponents over the tail window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub alpha0: f64,
    pub beta0: f64,
    pub window: (usize, usize),
    /// Trend slopes of the two ratios over the window.
    pub alpha_trend: f64,
    pub beta_trend: f64,
}

/// Smallest growth slope of `μ_{1,d}` per step accepted as divergent.
pub const DIVERGENCE_SLOPE: f64 = 1e-6;

fn check_divergent(mus: &[CartanVector], window: (usize, usize)) -> Result<()> {
    let d = mus.first().ok_or(Error::TooShort)?.dim();
    let y: Vec<f64> = mus[window.0..=window.1].iter().map(|m| m.g(1, d)).collect();
    if y.len() < 2 || !(slope_of(&y) > DIVERGENCE_SLOPE) || !(y[y.len() - 1] > 0.0) {
        return Err(Error::NotDivergent);
    }
    Ok(())
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// `α₀ = min μ_{1,d}/μ_{1,d-1}` and `β₀ = max μ_{1,d}/μ_{1,2}` over the tail
/// window.
pub fn spectral_alpha_beta(mus: &[CartanVector]) -> Result<SpectralEstimate> {
    let window = tail_window(mus.len());
    check_divergent(mus, window)?;
    let d = mus[0].dim();
    let tail = &mus[window.0..=window.1];
    let a: Vec<f64> = tail.iter().map(|m| ratio(m.g(1, d), m.g(1, d - 1))).collect();
    let b: Vec<f64> = tail.iter().map(|m| ratio(m.g(1, d), m.g(1, 2))).collect();
    let finite_slope = |v: &[f64]| if v.iter().all(|x| x.is_finite()) { slope_of(v) } else { f64::NAN };
    Ok(SpectralEstimate {
        alpha0: a.iter().copied().fold(f64::INFINITY, f64::min),
        beta0: b.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        window,
        alpha_trend: finite_slope(&a),
        beta_trend: finite_slope(&b),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformStats {
    pub ratio_min_tail: f64,
    pub divergent: bool,
    pub window: (usize, usize),
    pub ratios: Vec<f64>,
}

/// Tail minimum of `μ_{k,k+1}/μ_{1,d}`.
pub fn uniform_regularity_stats(mus: &[CartanVector], k: usize) -> Result<UniformStats> {
    let d = mus.first().ok_or(Error::TooShort)?.dim();
    if k < 1 || k >= d {
        return Err(Error::IndexOutOfRange(format!("k = {k} with d = {d}")));
    }
    uniform_regularity_stats_in(mus, k, tail_window(mus.len()))
}

/// Minimum of `μ_{k,k+1}/μ_{1,d}` over an explicit index window.
pub fn uniform_regularity_stats_in(mus: &[CartanVector], k: usize, window: (usize, usize)) -> Result<UniformStats> {
    let d = mus.first().ok_or(Error::TooShort)?.dim();
    if window.1 >= mus.len() || window.0 > window.1 {
        return Err(Error::OutOfRange(format!("window {window:?}")));
    }
    let divergent = check_divergent(mus, window).is_ok();
    let ratios: Vec<f64> = mus[window.0..=window.1].iter().map(|m| ratio(m.g(k, k + 1), m.g(1, d))).collect();
    Ok(UniformStats {
        ratio_min_tail: ratios.iter().copied().filter(|r| !r.is_nan()).fold(f64::INFINITY, f64::min),
        divergent,
        window,
        ratios,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrongUniformStats {
    pub min_ratio: f64,
    /// `(n, m)` with the lowest `n`, then lowest `m`, attaining the minimum.
    pub witness: (usize, usize),
    pub big_n: usize,
}

/// Minimum of `μ_{k,k+1}/μ_{1,d}` over the quotients `γ_n⁻¹γ_{n+m}`, `n ≥ 1`,
/// `m > N`.
pub fn strong_uniform_stats(gs: &GeneratorSet, elements: &[GroupElement], k: usize, big_n: usize) -> Result<StrongUniformStats> {
    let d = gs.dim();
    if k < 1 || k >= d {
        return Err(Error::IndexOutOfRange(format!("k = {k} with d = {d}")));
    }
    if elements.len() <= big_n + 2 {
        return Err(Error::TooShort);
    }
    let table = quotient_cartans(gs, elements)?;
    let mut best = (f64::INFINITY, (0, 0));
    for (n, row) in table.iter().enumerate().skip(1) {
        for (i, q) in row.iter().enumerate() {
            let m = i + 1;
            if m <= big_n {
                continue;
            }
            let r = ratio(q.g(k, k + 1), q.g(1, d));
            if r < best.0 {
                best = (r, (n, m));
            }
        }
    }
    Ok(StrongUniformStats {
        min_ratio: best.0,
        witness: best.1,
        big_n,
    })
}

/// Per-index constants of the sandwich inequalities on an annulus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichRow {
    pub n: usize,
    pub samples: usize,
    /// Smallest `B` for `|log f(x) + μ_{1,d}(γ_n)| ≤ B`.
    pub vertical: f64,
    /// Smallest `B` for `-μ_{1,d-1} - B ≤ log‖x‖ ≤ -μ_{1,2} + B`.
    pub horizontal: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub b: f64,
    /// Trend slope of the per-index constant over the window.
    pub b_trend: f64,
}

/// Evaluates the sandwich inequalities for `n` in `window`, with `S_n` the
/// grid points whose height lies in `[t_n - step, t_n]`.
pub fn sandwich_check(chart: &AdaptedChart, mus: &[CartanVector], step: f64, window: (usize, usize)) -> Result<SandwichReport> {
    if mus.is_empty() {
        return Err(Error::Precondition("requires a tracking sequence".into()));
    }
    let d = mus[0].dim();
    let mut rows = Vec::new();
    for n in window.0..=window.1.min(mus.len() - 1) {
        let t = n as f64 * step;
        let pts: Vec<&GraphSample> = chart
            .samples
            .iter()
            .filter(|s| s.f > 0.0 && s.h >= t - step && s.h <= t)
            .collect();
        if pts.is_empty() {
            return Err(Error::EmptyAnnulus(n));
        }
        let mu = &mus[n];
        let vertical = pts.iter().map(|s| (s.f.ln() + mu.g(1, d)).abs()).fold(0.0, f64::max);
        let horizontal = pts
            .iter()
            .map(|s| {
                let lr = s.r.ln();
                (-mu.g(1, d - 1) - lr).max(lr + mu.g(1, 2))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(SandwichRow {
            n,
            samples: pts.len(),
            vertical,
            horizontal,
        });
    }
    let per: Vec<f64> = rows.iter().map(|r| r.vertical.max(r.horizontal)).collect();
    Ok(SandwichReport {
        b: per.iter().copied().fold(0.0, f64::max),
        b_trend: if per.len() >= 2 { slope_of(&per) } else { 0.0 },
        rows,
    })
}

/// Gap growth thresholds for face detection.
pub const GROWING_SLOPE: f64 = 0.05;
pub const BOUNDED_SLOPE: f64 = 1e-3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceDimension {
    pub k: usize,
    /// Fitted slope of each consecutive gap over the window.
    pub gap_slopes: Vec<f64>,
    /// Largest value of the bounded gaps over the window.
    pub bound: f64,
}

/// The `k` with gaps `μ_{l,l+1}`, `l ≤ k`, bounded and `μ_{k+1,k+2}` growing.
pub fn face_dimension_from_gaps(mus: &[CartanVector]) -> Result<FaceDimension> {
    let window = tail_window(mus.len());
    check_divergent(mus, window)?;
    let d = mus[0].dim();
    let tail = &mus[window.0..=window.1];
    let slopes: Vec<f64> = (1..d)
        .map(|l| slope_of(&tail.iter().map(|m| m.g(l, l + 1)).collect::<Vec<_>>()))
        .collect();
    let k = slopes.iter().position(|&s| s > GROWING_SLOPE).ok_or(Error::NoStableGap)?;
    if slopes[..k].iter().any(|s| s.abs() > BOUNDED_SLOPE) {
        return Err(Error::NoStableGap);
    }
    let bound = (1..=k)
        .flat_map(|l| tail.iter().map(move |m| m.g(l, l + 1)))
        .fold(0.0, f64::max);
    Ok(FaceDimension {
        k,
        gap_slopes: slopes,
        bound,
    })
}

/// Boundary and spectral exponents with the regularity statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityReport {
    pub alpha_spectral: f64,
    pub beta_spectral: f64,
    pub alpha_boundary: Option<f64>,
    pub beta_boundary: Option<f64>,
    pub uniform_k_ratio: Vec<(usize, f64)>,
    pub strong_uniform_min: Option<f64>,
    pub tail_window: (usize, usize),
    pub big_n: usize,
    pub tolerance: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(mu: &[f64]) -> CartanVector {
        CartanVector { mu: mu.to_vec() }
    }

    #[test]
    fn boost_ratios() {
        let mus: Vec<CartanVector> = (0..20).map(|n| cv(&[n as f64, 0.0, -(n as f64)])).collect();
        let s = spectral_alpha_beta(&mus).unwrap();
        assert_eq!((s.alpha0, s.beta0), (2.0, 2.0));
        let u = uniform_regularity_stats(&mus, 1).unwrap();
        assert_eq!(u.ratio_min_tail, 0.5);
        assert_eq!(face_dimension_from_gaps(&mus).unwrap().k, 0);
    }

    #[test]
    fn constant_sequence_is_not_divergent() {
        let mus = vec![cv(&[0.0, 0.0, 0.0]); 10];
        assert!(matches!(spectral_alpha_beta(&mus), Err(Error::NotDivergent)));
    }

    #[test]
    fn edge_sequence_has_face_dimension_one() {
        let l2 = 2f64.ln();
        let mus: Vec<CartanVector> = (0..20)
            .map(|n| {
                let n = n as f64;
                let m = n * l2 / 3.0;
                cv(&[n * l2 - m, n * l2 - m, -m])
            })
            .collect();
        assert_eq!(face_dimension_from_gaps(&mus).unwrap().k, 1);
        assert_eq!(uniform_regularity_stats(&mus, 1).unwrap().ratio_min_tail, 0.0);
    }
}
