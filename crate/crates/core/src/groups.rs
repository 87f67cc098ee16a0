//! Generator sets, words, orbit balls, tracking sequences, the flat
//! direction of a rank-two diagonal group, the `w_k` words and the
//! straightness residual.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::domains::{convex_hull_2d, ConvexDomain};
use crate::error::{Error, Result};
use crate::exec;
use crate::hilbert::{hil, Geodesic};
use crate::projlin::{cartan_of_prefixes, cartan_of_product, CartanVector, Mat, ProjectiveMap, ProjectivePoint, Vector};

/// A word as runs `(generator, exponent)` with nonzero exponents and no two
/// adjacent runs on the same generator.
pub type Word = Vec<(usize, i64)>;

/// A single letter: generator index and sign.
pub type Letter = (usize, i8);

/// Default cap on orbit-ball sizes.
pub const DEFAULT_ORBIT_CAP: usize = 200_000;

/// Tolerance for deduplicating orbit-ball maps.
pub const DEDUP_TOL: f64 = 1e-9;

/// Finite generating set with cached inverses.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    gens: Vec<ProjectiveMap>,
    invs: Vec<ProjectiveMap>,
    involution: Vec<bool>,
    diagonal: Vec<bool>,
}

fn projective_normal(m: &Mat) -> Mat {
    let n = m.norm();
    let mut out = m / n;
    let lead = out.iter().copied().find(|x| x.abs() > 1e-9).unwrap_or(1.0);
    if lead < 0.0 {
        out = -out;
    }
    out
}

fn rescale_mat(m: &mut Mat) {
    let s = m.amax();
    if s > 0.0 && s.is_finite() {
        *m *= crate::dd::pow2(-crate::dd::exponent(s));
    }
}

fn rescale_vec(v: &mut Vector) {
    let s = v.amax();
    if s > 0.0 && s.is_finite() {
        *v *= crate::dd::pow2(-crate::dd::exponent(s));
    }
}

impl GeneratorSet {
    pub fn new(gens: Vec<ProjectiveMap>) -> Result<Self> {
        let d = gens.first().ok_or(Error::EmptyProduct)?.dim();
        if gens.iter().any(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch("generators of different sizes".into()));
        }
        let invs = gens.iter().map(|g| g.inverse()).collect::<Result<Vec<_>>>()?;
        let eye = projective_normal(&Mat::identity(d, d));
        let involution = gens
            .iter()
            .map(|g| {
                let sq = g.matrix() * g.matrix();
                (projective_normal(&sq) - &eye).amax() <= 1e-12
            })
            .collect();
        let diagonal = gens
            .iter()
            .map(|g| {
                let m = g.matrix();
                (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == 0.0))
            })
            .collect();
        Ok(Self {
            gens,
            invs,
            involution,
            diagonal,
        })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.gens[0].dim()
    }

    pub fn generator(&self, i: usize) -> &ProjectiveMap {
        &self.gens[i]
    }

    pub fn is_involution(&self, i: usize) -> bool {
        self.involution[i]
    }

    /// Letters in canonical order: `g_0, g_0⁻¹, g_1, …`, omitting inverses
    /// of involutions.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            out.push((i, 1));
            if !self.involution[i] {
                out.push((i, -1));
            }
        }
        out
    }

    pub fn letter_map(&self, l: Letter) -> &ProjectiveMap {
        if l.1 > 0 || self.involution[l.0] {
            &self.gens[l.0]
        } else {
            &self.invs[l.0]
        }
    }

    fn inverse_letter_map(&self, l: Letter) -> &ProjectiveMap {
        self.letter_map((l.0, -l.1))
    }

    /// The letter sequence of a word.
    pub fn expand(&self, w: &Word) -> Vec<Letter> {
        let mut out = Vec::new();
        for &(g, e) in w {
            let s = if e > 0 { 1 } else { -1 };
            let count = if self.involution[g] { (e.unsigned_abs() % 2) as usize } else { e.unsigned_abs() as usize };
            out.extend(std::iter::repeat_n((g, s), count));
        }
        out
    }

    /// Factor list whose ordered product is the word.
    pub fn factors(&self, w: &Word) -> Vec<ProjectiveMap> {
        self.expand(w).into_iter().map(|l| self.letter_map(l).clone()).collect()
    }

    /// Rescaled matrix product of a word.
    pub fn eval(&self, w: &Word) -> Mat {
        let d = self.dim();
        let mut m = Mat::identity(d, d);
        for l in self.expand(w) {
            m = &m * self.letter_map(l).matrix();
            rescale_mat(&mut m);
        }
        m
    }

    /// `w · v`, applying the last letter first.
    pub fn apply(&self, w: &Word, v: &Vector) -> Vector {
        let mut out = v.clone();
        for l in self.expand(w).into_iter().rev() {
            out = self.letter_map(l).apply_vec(&out);
            rescale_vec(&mut out);
        }
        out
    }

    /// `w⁻¹ · v`, applying the inverse of the first letter first.
    pub fn apply_inverse(&self, w: &Word, v: &Vector) -> Vector {
        let mut out = v.clone();
        for l in self.expand(w) {
            out = self.inverse_letter_map(l).apply_vec(&out);
            rescale_vec(&mut out);
        }
        out
    }

    /// Letters applied to `v` right to left in double-double arithmetic.
    fn apply_letters_dd(&self, letters: &[Letter], v: &Vector) -> Vec<Dd> {
        let d = self.dim();
        let mut out: Vec<Dd> = v.iter().map(|&a| dd::dd(a)).collect();
        for l in letters.iter().rev() {
            let m = self.letter_map(*l).matrix();
            let next: Vec<Dd> = (0..d)
                .map(|i| (0..d).fold(dd::zero(), |acc, j| acc + out[j] * m[(i, j)]))
                .collect();
            let s = next.iter().map(|a| a.hi().abs()).fold(0.0, f64::max);
            let k = dd::pow2(-dd::exponent(s));
            out = next.into_iter().map(|a| a * k).collect();
        }
        out
    }

    /// Appends one letter, cancelling where possible.
    pub fn push_letter(&self, w: &mut Word, l: Letter) {
        let (g, s) = (l.0, l.1 as i64);
        if let Some(last) = w.last_mut() {
            if last.0 == g {
                let e = if self.involution[g] { (last.1 + s).rem_euclid(2) } else { last.1 + s };
                if e == 0 {
                    w.pop();
                } else {
                    last.1 = e;
                }
                return;
            }
        }
        w.push((g, s));
    }

    /// Freely reduced product of two words.
    pub fn concat(&self, a: &Word, b: &Word) -> Word {
        let mut out = a.clone();
        for l in self.expand(b) {
            self.push_letter(&mut out, l);
        }
        out
    }

    pub fn inverse_word(&self, w: &Word) -> Word {
        w.iter().rev().map(|&(g, e)| (g, -e)).collect()
    }

    /// Reduced form of an arbitrary run list.
    pub fn reduce(&self, w: &Word) -> Word {
        self.concat(&Vec::new(), w)
    }

    /// Word length in letters.
    pub fn word_length(&self, w: &Word) -> usize {
        self.expand(w).len()
    }

    /// `hil(x, w·y)`. On facet domains `w·y` and the facet values are
    /// carried in double-double; otherwise it is evaluated as `hil(A⁻¹x, B y)`
    /// for the split `w = A B` after the longest prefix of diagonal letters,
    /// which keeps points far out along a diagonal axis at full relative
    /// precision.
    pub fn word_distance(&self, dom: &ConvexDomain, w: &Word, x: &Vector, y: &Vector) -> Result<f64> {
        let letters = self.expand(w);
        if let Some(facets) = dom.facets() {
            let xd: Vec<Dd> = x.iter().map(|&a| dd::dd(a)).collect();
            let yd = self.apply_letters_dd(&letters, y);
            return crate::hilbert::facet_hil_dd(facets, &xd, &yd);
        }
        let split = letters.iter().take_while(|l| self.diagonal[l.0]).count();
        let mut xa = x.clone();
        for l in &letters[..split] {
            xa = self.inverse_letter_map(*l).apply_vec(&xa);
            rescale_vec(&mut xa);
        }
        let mut yb = y.clone();
        for l in letters[split..].iter().rev() {
            yb = self.letter_map(*l).apply_vec(&yb);
            rescale_vec(&mut yb);
        }
        hil(dom, &xa, &yb)
    }
}

/// A group element: a reduced word and its rescaled matrix product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub word: Word,
    matrix: Mat,
}

impl GroupElement {
    pub fn identity(d: usize) -> Self {
        Self {
            word: Vec::new(),
            matrix: Mat::identity(d, d),
        }
    }

    pub fn from_word(gs: &GeneratorSet, word: Word) -> Self {
        let word = gs.reduce(&word);
        let matrix = gs.eval(&word);
        Self { word, matrix }
    }

    /// Product matrix rescaled by a power of two.
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn map(&self) -> Result<ProjectiveMap> {
        ProjectiveMap::new(self.matrix.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Largest deviation, over the given test vectors, between the stored
    /// map and the word evaluated letter by letter, as projective points.
    pub fn coherence_error(&self, gs: &GeneratorSet, vectors: &[Vector]) -> f64 {
        vectors
            .iter()
            .map(|v| {
                let a = &self.matrix * v;
                let b = gs.apply(&self.word, v);
                let (a, b) = (a.normalize(), b.normalize());
                (&a - &b).norm().min((&a + &b).norm())
            })
            .fold(0.0, f64::max)
    }
}

fn dedup_key(m: &Mat) -> f64 {
    m.iter()
        .enumerate()
        .map(|(i, x)| x * (1.0 + 0.6180339887498949 * (i as f64 + 1.0)).sqrt())
        .sum()
}

/// All reduced words of length at most `l`, deduplicated by projective map
/// equality within [`DEDUP_TOL`], in order of length then lexicographic
/// letter order.
pub fn orbit_ball(gs: &GeneratorSet, l: usize, cap: usize) -> Result<Vec<GroupElement>> {
    let d = gs.dim();
    let letters = gs.letters();
    let mut out = vec![GroupElement::identity(d)];
    let mut normals = vec![projective_normal(&Mat::identity(d, d))];
    let mut index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let bin = |k: f64| (k * 1e6).floor() as i64;
    index.entry(bin(dedup_key(&normals[0]))).or_default().push(0);
    let mut frontier = vec![0usize];
    for _ in 0..l {
        let mut next = Vec::new();
        for &p in &frontier {
            for &lt in &letters {
                let parent = &out[p];
                if let Some(&(g, e)) = parent.word.last() {
                    if g == lt.0 && (gs.involution[g] || e.signum() != lt.1 as i64) {
                        continue;
                    }
                }
                let mut word = parent.word.clone();
                gs.push_letter(&mut word, lt);
                let mut m = parent.matrix.clone() * gs.letter_map(lt).matrix();
                rescale_mat(&mut m);
                let nm = projective_normal(&m);
                let key = dedup_key(&nm);
                let b = bin(key);
                let dup = (b - 1..=b + 1).any(|k| {
                    index
                        .get(&k)
                        .is_some_and(|v| v.iter().any(|&j| (&normals[j] - &nm).amax() <= DEDUP_TOL))
                });
                if dup {
                    continue;
                }
                let idx = out.len();
                if idx >= cap {
                    return Err(Error::ExplosionGuard(cap));
                }
                index.entry(b).or_default().push(idx);
                normals.push(nm);
                out.push(GroupElement { word, matrix: m });
                next.push(idx);
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// Reduced words with their rescaled products, for generating sets of
/// involutions (or any generating set).
pub fn reduced_words_involutions(gens: &[ProjectiveMap], depth: usize, cap: usize) -> Result<Vec<(Vec<usize>, Mat)>> {
    let gs = GeneratorSet::new(gens.to_vec())?;
    Ok(orbit_ball(&gs, depth, cap)?
        .into_iter()
        .map(|e| {
            let letters = gs.expand(&e.word).into_iter().map(|l| l.0).collect();
            (letters, e.matrix)
        })
        .collect())
}

/// How each `γ_n` is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackingMode {
    /// `γ_n` ranges over the whole orbit ball.
    Global,
    /// `γ_n = γ_{n-1} h` with `h` in the orbit ball.
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingOptions {
    pub mode: TrackingMode,
    /// Hilbert time between consecutive samples `c(n · step)`.
    pub step: f64,
    /// Residual above which the search reports [`Error::RayExitsReach`].
    pub fail_threshold: f64,
    pub cap: usize,
}

impl Default for TrackingOptions {
    fn default() -> Self {
        Self {
            mode: TrackingMode::Global,
            step: 1.0,
            fail_threshold: 10.0,
            cap: DEFAULT_ORBIT_CAP,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackingSequence {
    pub elements: Vec<GroupElement>,
    pub basepoint: ProjectivePoint,
    pub ray: Geodesic,
    pub residuals: Vec<f64>,
    pub achieved_r: f64,
    pub step: f64,
}

/// Residuals below this are treated as ties.
const TIE_TOL: f64 = 1e-12;

fn pick(residuals: &[f64]) -> Option<usize> {
    let best = residuals.iter().copied().fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    residuals.iter().position(|&r| r <= best + TIE_TOL)
}

/// Group elements `γ_0, …, γ_N` with `γ_n⁻¹ c(n)` closest to `x₀`.
pub fn tracking_sequence(
    dom: &ConvexDomain,
    gs: &GeneratorSet,
    ray: &Geodesic,
    x0: &Vector,
    n_max: usize,
    l_max: usize,
    opts: &TrackingOptions,
) -> Result<TrackingSequence> {
    if !dom.is_inside(x0) {
        return Err(Error::NotInterior);
    }
    let ball = orbit_ball(gs, l_max, opts.cap)?;
    let point = |n: usize| ray.point_vec(n as f64 * opts.step);
    let (elements, residuals) = match opts.mode {
        TrackingMode::Global => {
            let rows = exec::map_indexed(n_max + 1, |n| {
                let c = point(n);
                let res: Vec<f64> = ball
                    .iter()
                    .map(|g| hil(dom, x0, &gs.apply_inverse(&g.word, &c)).unwrap_or(f64::INFINITY))
                    .collect();
                pick(&res).map(|i| (i, res[i]))
            });
            let mut els = Vec::new();
            let mut rs = Vec::new();
            for (n, r) in rows.into_iter().enumerate() {
                let (i, v) = r.ok_or(Error::RayExitsReach(f64::INFINITY))?;
                if v > opts.fail_threshold {
                    return Err(Error::RayExitsReach(v));
                }
                let _ = n;
                els.push(ball[i].clone());
                rs.push(v);
            }
            (els, rs)
        }
        TrackingMode::Incremental => {
            let mut els: Vec<GroupElement> = Vec::new();
            let mut rs = Vec::new();
            let mut current = GroupElement::identity(gs.dim());
            for n in 0..=n_max {
                let y = gs.apply_inverse(&current.word, &point(n));
                let res = exec::map_slice(&ball, |h| {
                    hil(dom, x0, &gs.apply_inverse(&h.word, &y)).unwrap_or(f64::INFINITY)
                });
                let i = pick(&res).ok_or(Error::RayExitsReach(f64::INFINITY))?;
                if res[i] > opts.fail_threshold {
                    return Err(Error::RayExitsReach(res[i]));
                }
                current = GroupElement::from_word(gs, gs.concat(&current.word, &ball[i].word));
                els.push(current.clone());
                rs.push(res[i]);
            }
            (els, rs)
        }
    };
    let achieved_r = residuals.iter().copied().fold(0.0, f64::max);
    Ok(TrackingSequence {
        elements,
        basepoint: ProjectivePoint::new(x0.clone())?,
        ray: ray.clone(),
        residuals,
        achieved_r,
        step: opts.step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiproximalityReport {
    pub biproximal: bool,
    /// Relative gaps `|λ_1|/|λ_2| - 1` and `|λ_{d-1}|/|λ_d| - 1`.
    pub eigen_gaps: (f64, f64),
}

/// Whether the extreme eigenvalue moduli are simple.
pub fn biproximality_check(m: &Mat) -> BiproximalityReport {
    let d = m.nrows();
    let mut mods: Vec<f64> = m.clone().complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.total_cmp(a));
    if d < 2 {
        return BiproximalityReport {
            biproximal: false,
            eigen_gaps: (0.0, 0.0),
        };
    }
    let top = mods[0] / mods[1] - 1.0;
    let bottom = mods[d - 2] / mods[d - 1] - 1.0;
    BiproximalityReport {
        biproximal: top > 1e-8 && bottom > 1e-8,
        eigen_gaps: (top, bottom),
    }
}

/// Log eigenvalue moduli `ℓ_1 ≥ … ≥ ℓ_d`.
pub fn log_eigen_moduli(m: &Mat) -> Vec<f64> {
    let mut l: Vec<f64> = m.clone().complex_eigenvalues().iter().map(|z| z.norm().ln()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

/// Weights of a rank-two diagonalizable group on its simultaneous
/// eigenlines, with the hull polygon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightPolygon {
    /// `w_i = (log|λ_i(a)|, log|λ_i(b)|)`.
    pub weights: Vec<[f64; 2]>,
    /// Weight indices of the hull vertices in counterclockwise order.
    pub hull: Vec<usize>,
    pub contains_origin: bool,
}

/// The chosen edge, direction and lattice path of a flat direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatDirection {
    pub polygon: WeightPolygon,
    pub edge: (usize, usize),
    pub direction: [f64; 2],
}

fn null_vector(m: &Mat) -> Vector {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    vt.row(k).transpose()
}

/// Weight polygon and flat direction of `⟨a, b⟩`.
pub fn flat_direction(a: &ProjectiveMap, b: &ProjectiveMap) -> Result<FlatDirection> {
    let (ma, mb) = (a.matrix(), b.matrix());
    let d = ma.nrows();
    let comm = ma * mb - mb * ma;
    if comm.amax() > 1e-10 * (ma.amax() * mb.amax()).max(1.0) {
        return Err(Error::NotCommuting);
    }
    let generic = ma + mb * std::f64::consts::FRAC_1_SQRT_2;
    let eig = generic.clone().complex_eigenvalues();
    if eig.iter().any(|z| z.im.abs() > 1e-12 * z.norm().max(1.0)) {
        return Err(Error::NotCommuting);
    }
    let mut lams: Vec<f64> = eig.iter().map(|z| z.re).collect();
    lams.sort_by(|x, y| y.total_cmp(x));
    let mut p = Mat::zeros(d, d);
    for (j, &l) in lams.iter().enumerate() {
        let v = null_vector(&(&generic - Mat::identity(d, d) * l));
        p.set_column(j, &v);
    }
    let pinv = p.clone().try_inverse().ok_or(Error::NotCommuting)?;
    let da = &pinv * ma * &p;
    let db = &pinv * mb * &p;
    let off = |m: &Mat| {
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| m[(i, j)].abs())
            .fold(0.0, f64::max)
    };
    if off(&da) > 1e-9 * da.amax() || off(&db) > 1e-9 * db.amax() {
        return Err(Error::NotCommuting);
    }
    let weights: Vec<[f64; 2]> = (0..d).map(|i| [da[(i, i)].abs().ln(), db[(i, i)].abs().ln()]).collect();
    let hull_pts = convex_hull_2d(&weights);
    let area: f64 = (0..hull_pts.len())
        .map(|i| {
            let (p, q) = (hull_pts[i], hull_pts[(i + 1) % hull_pts.len()]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        / 2.0;
    if hull_pts.len() < 3 || area.abs() < 1e-12 {
        return Err(Error::DegenerateWeights);
    }
    let hull: Vec<usize> = hull_pts
        .iter()
        .map(|h| weights.iter().position(|w| (w[0] - h[0]).abs() + (w[1] - h[1]).abs() < 1e-12).unwrap())
        .collect();
    let contains_origin = (0..hull_pts.len()).all(|i| {
        let (p, q) = (hull_pts[i], hull_pts[(i + 1) % hull_pts.len()]);
        (q[0] - p[0]) * (-p[1]) - (q[1] - p[1]) * (-p[0]) > 0.0
    });
    let edge = (0..hull.len())
        .map(|i| {
            let (x, y) = (hull[i], hull[(i + 1) % hull.len()]);
            (x.min(y), x.max(y))
        })
        .min()
        .unwrap();
    let (wi, wj) = (weights[edge.0], weights[edge.1]);
    let t = [wj[0] - wi[0], wj[1] - wi[1]];
    let mut v = [-t[1], t[0]];
    if v[0] * wi[0] + v[1] * wi[1] < 0.0 {
        v = [-v[0], -v[1]];
    }
    let n = v[0].hypot(v[1]);
    Ok(FlatDirection {
        polygon: WeightPolygon {
            weights,
            hull,
            contains_origin,
        },
        edge,
        direction: [v[0] / n, v[1] / n],
    })
}

impl FlatDirection {
    /// Lattice point `(u, v)` with `|u| + |v| = n` nearest the ray through
    /// the direction, ties broken lexicographically.
    pub fn lattice_point(&self, n: usize) -> (i64, i64) {
        let n = n as i64;
        let dir = self.direction;
        let dist = |u: i64, v: i64| {
            let (x, y) = (u as f64, v as f64);
            let s = (x * dir[0] + y * dir[1]).max(0.0);
            (x - s * dir[0]).hypot(y - s * dir[1])
        };
        let mut cands: Vec<(i64, i64)> = Vec::new();
        for u in -n..=n {
            let r = n - u.abs();
            cands.push((u, -r));
            if r != 0 {
                cands.push((u, r));
            }
        }
        cands.sort();
        let mut best = cands[0];
        let mut bd = dist(best.0, best.1);
        for &(u, v) in &cands[1..] {
            let dd = dist(u, v);
            if dd < bd - 1e-12 {
                best = (u, v);
                bd = dd;
            }
        }
        best
    }

    /// Word of `a_n` over generators `a = 0`, `b = 1`.
    pub fn word(&self, n: usize) -> Word {
        let (u, v) = self.lattice_point(n);
        let mut w = Vec::new();
        if u != 0 {
            w.push((0, u));
        }
        if v != 0 {
            w.push((1, v));
        }
        w
    }

    /// `max_{n ≤ n_max} μ_{1,2}(a_n)`.
    pub fn certificate(&self, gs: &GeneratorSet, n_max: usize) -> Result<f64> {
        let mut c: f64 = 0.0;
        for n in 0..=n_max {
            c = c.max(word_cartan(gs, &self.word(n))?.g(1, 2));
        }
        Ok(c)
    }
}

/// Cartan projection of a word through its factor list.
pub fn word_cartan(gs: &GeneratorSet, w: &Word) -> Result<CartanVector> {
    let f = gs.factors(w);
    if f.is_empty() {
        return Ok(CartanVector { mu: vec![0.0; gs.dim()] });
    }
    cartan_of_product(&f)
}

/// `w_k` over generators `a = 0`, `b = 1`, `γ = 2`: `w_0 = id`,
/// `w_{2m} = a_1 γ a_2 γ² ⋯ a_m γ^m`, `w_{2m+1} = w_{2m} a_{m+1}`.
pub fn wk_word(flat: &FlatDirection, k: usize) -> Word {
    let mut w: Word = Vec::new();
    let m = k / 2;
    let push = |w: &mut Word, g: usize, e: i64| {
        if e == 0 {
            return;
        }
        match w.last_mut() {
            Some(last) if last.0 == g => last.1 += e,
            _ => w.push((g, e)),
        }
    };
    for j in 1..=m {
        for (g, e) in flat.word(j) {
            push(&mut w, g, e);
        }
        push(&mut w, 2, j as i64);
    }
    if k % 2 == 1 {
        for (g, e) in flat.word(m + 1) {
            push(&mut w, g, e);
        }
    }
    w.retain(|r| r.1 != 0);
    w
}

/// `w_k` as a group element over `[a, b, γ]`.
pub fn wk_builder(gs: &GeneratorSet, flat: &FlatDirection, k: usize) -> Result<GroupElement> {
    if gs.len() != 3 {
        return Err(Error::Precondition("generators must be [a, b, γ]".into()));
    }
    if !biproximality_check(gs.generator(2).matrix()).biproximal {
        return Err(Error::NotBiproximal);
    }
    Ok(GroupElement::from_word(gs, wk_word(flat, k)))
}

/// Whether each letter sequence extends the previous one.
fn nested(seqs: &[Vec<Letter>]) -> bool {
    seqs.windows(2).all(|w| w[1].len() >= w[0].len() && w[1][..w[0].len()] == w[0][..])
}

/// Cartan projections of every element.
pub fn sequence_cartans(gs: &GeneratorSet, elements: &[GroupElement]) -> Result<Vec<CartanVector>> {
    let seqs: Vec<Vec<Letter>> = elements.iter().map(|e| gs.expand(&e.word)).collect();
    if nested(&seqs) && !seqs.is_empty() {
        let last = seqs.last().unwrap();
        let factors: Vec<ProjectiveMap> = last.iter().map(|l| gs.letter_map(*l).clone()).collect();
        let pref = if factors.is_empty() { Vec::new() } else { cartan_of_prefixes(&factors)? };
        let zero = CartanVector { mu: vec![0.0; gs.dim()] };
        return Ok(seqs
            .iter()
            .map(|s| if s.is_empty() { zero.clone() } else { pref[s.len() - 1].clone() })
            .collect());
    }
    exec::map_slice(elements, |e| word_cartan(gs, &e.word))
        .into_iter()
        .collect()
}

/// `table[n][m-1] = μ(γ_n⁻¹ γ_{n+m})` for `m ≥ 1`.
pub fn quotient_cartans(gs: &GeneratorSet, elements: &[GroupElement]) -> Result<Vec<Vec<CartanVector>>> {
    let seqs: Vec<Vec<Letter>> = elements.iter().map(|e| gs.expand(&e.word)).collect();
    let len = elements.len();
    let zero = CartanVector { mu: vec![0.0; gs.dim()] };
    if nested(&seqs) && len > 0 {
        let last = seqs.last().unwrap().clone();
        let rows = exec::map_indexed(len, |n| -> Result<Vec<CartanVector>> {
            let start = seqs[n].len();
            let suffix: Vec<ProjectiveMap> = last[start..].iter().map(|l| gs.letter_map(*l).clone()).collect();
            let pref = if suffix.is_empty() { Vec::new() } else { cartan_of_prefixes(&suffix)? };
            Ok(((n + 1)..len)
                .map(|j| {
                    let k = seqs[j].len() - start;
                    if k == 0 {
                        zero.clone()
                    } else {
                        pref[k - 1].clone()
                    }
                })
                .collect())
        });
        return rows.into_iter().collect();
    }
    let rows = exec::map_indexed(len, |n| -> Result<Vec<CartanVector>> {
        let inv = gs.inverse_word(&elements[n].word);
        ((n + 1)..len)
            .map(|j| word_cartan(gs, &gs.concat(&inv, &elements[j].word)))
            .collect()
    });
    rows.into_iter().collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StraightnessReport {
    pub d_hat: f64,
    /// `(n, m)` attaining `d_hat`.
    pub witness: Option<(usize, usize)>,
    /// `table[n][m-1]` is the violation at `(n, m)`.
    pub table: Vec<Vec<f64>>,
}

/// Largest `μ_{i,i+1}(γ_n) + μ_{i,i+1}(γ_n⁻¹γ_{n+m}) - μ_{i,i+1}(γ_{n+m})`
/// over `m ≥ 1`.
pub fn straightness_residual(gs: &GeneratorSet, elements: &[GroupElement], i: usize) -> Result<StraightnessReport> {
    let d = gs.dim();
    if i != 1 && i != d - 1 {
        return Err(Error::IndexOutOfRange(format!("i = {i} with d = {d}")));
    }
    if elements.len() < 2 {
        return Err(Error::TooShort);
    }
    let mus = sequence_cartans(gs, elements)?;
    let quots = quotient_cartans(gs, elements)?;
    let mut table = Vec::with_capacity(elements.len());
    let mut d_hat = f64::NEG_INFINITY;
    let mut witness = None;
    for (n, row) in quots.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (k, q) in row.iter().enumerate() {
            let m = k + 1;
            let v = mus[n].g(i, i + 1) + q.g(i, i + 1) - mus[n + m].g(i, i + 1);
            if v > d_hat {
                d_hat = v;
                witness = Some((n, m));
            }
            r.push(v);
        }
        table.push(r);
    }
    Ok(StraightnessReport { d_hat, witness, table })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvDistanceReport {
    /// `μ_{1,d}(γ_n) - 2 hil(x₀, γ_n x₀)`.
    pub values: Vec<f64>,
    pub max_abs: f64,
}

/// Deviation between `μ_{1,d}` and twice the displacement of `x₀`.
pub fn sv_distance_gap(dom: &ConvexDomain, gs: &GeneratorSet, elements: &[GroupElement], x0: &Vector) -> Result<SvDistanceReport> {
    let d = gs.dim();
    let mus = sequence_cartans(gs, elements)?;
    let dists: Vec<Result<f64>> = exec::map_slice(elements, |e| gs.word_distance(dom, &e.word, x0, x0));
    let mut values = Vec::with_capacity(elements.len());
    for (mu, dist) in mus.iter().zip(dists) {
        values.push(mu.g(1, d) - 2.0 * dist?);
    }
    let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(SvDistanceReport { values, max_abs })
}

/// Same as [`sv_distance_gap`] for a tracking sequence.
pub fn sv_distance_gap_of(dom: &ConvexDomain, gs: &GeneratorSet, seq: &TrackingSequence) -> Result<SvDistanceReport> {
    sv_distance_gap(dom, gs, &seq.elements, seq.basepoint.coords())
}

/// Displacement and gaps `(hil(x₀, γx₀), μ_{1,2}(γ), μ_{1,d}(γ))` over an
/// orbit ball.
pub fn orbit_profile(dom: &ConvexDomain, gs: &GeneratorSet, ball: &[GroupElement], x0: &Vector) -> Result<Vec<(f64, f64, f64)>> {
    let d = gs.dim();
    exec::map_slice(ball, |e| -> Result<(f64, f64, f64)> {
        let dist = gs.word_distance(dom, &e.word, x0, x0)?;
        let mu = word_cartan(gs, &e.word)?;
        Ok((dist, mu.g(1, 2), mu.g(1, d)))
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(x: &[f64]) -> ProjectiveMap {
        ProjectiveMap::diag(x).unwrap()
    }

    #[test]
    fn lattice_ball_sizes() {
        let gs = GeneratorSet::new(vec![diag(&[2., 1., 0.5]), diag(&[1., 2., 0.5])]).unwrap();
        assert_eq!(orbit_ball(&gs, 0, 100).unwrap().len(), 1);
        assert_eq!(orbit_ball(&gs, 2, 100).unwrap().len(), 13);
        assert!(matches!(orbit_ball(&gs, 3, 10), Err(Error::ExplosionGuard(10))));
    }

    #[test]
    fn dedup_of_inverse_pair() {
        let g = diag(&[2., 1., 0.5]);
        let gs = GeneratorSet::new(vec![g.clone(), g.inverse().unwrap()]).unwrap();
        let ball = orbit_ball(&gs, 2, 100).unwrap();
        assert_eq!(ball.len(), 5);
    }

    #[test]
    fn involution_words_do_not_repeat() {
        let s = ProjectiveMap::from_rows(&[vec![-1., 0.], vec![0., 1.]]).unwrap();
        let t = ProjectiveMap::from_rows(&[vec![0., 1.], vec![1., 0.]]).unwrap();
        let gs = GeneratorSet::new(vec![s, t]).unwrap();
        assert!(gs.is_involution(0) && gs.is_involution(1));
        assert_eq!(gs.letters().len(), 2);
        let mut w = vec![(0, 1)];
        gs.push_letter(&mut w, (0, 1));
        assert!(w.is_empty());
    }

    #[test]
    fn biproximality_examples() {
        assert!(biproximality_check(diag(&[8., 2., 0.5, 0.125]).matrix()).biproximal);
        assert!(!biproximality_check(diag(&[2., 2., 0.5, 0.5]).matrix()).biproximal);
        let r = Mat::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        assert!(!biproximality_check(&r).biproximal);
    }

    #[test]
    fn flat_direction_of_diagonal_pair() {
        let a = diag(&[2., 2., 0.5, 0.5]);
        let b = diag(&[2., 0.5, 2., 0.5]);
        let flat = flat_direction(&a, &b).unwrap();
        assert!(flat.polygon.contains_origin);
        for n in 0..6 {
            assert_eq!(flat.lattice_point(n), (n as i64, 0));
        }
        let gs = GeneratorSet::new(vec![a, b]).unwrap();
        assert_eq!(flat.certificate(&gs, 10).unwrap(), 0.0);
    }

    #[test]
    fn wk_words_unroll() {
        let a = diag(&[2., 2., 0.5, 0.5]);
        let b = diag(&[2., 0.5, 2., 0.5]);
        let flat = flat_direction(&a, &b).unwrap();
        assert!(wk_word(&flat, 0).is_empty());
        assert_eq!(wk_word(&flat, 2), vec![(0, 1), (2, 1)]);
        assert_eq!(wk_word(&flat, 5), vec![(0, 1), (2, 1), (0, 2), (2, 2), (0, 3)]);
    }

    #[test]
    fn straightness_of_identity_sequence() {
        let gs = GeneratorSet::new(vec![diag(&[2., 1., 0.5])]).unwrap();
        let seq = vec![GroupElement::identity(3); 4];
        let r = straightness_residual(&gs, &seq, 1).unwrap();
        assert_eq!(r.d_hat, 0.0);
        assert!(straightness_residual(&gs, &seq, 3).is_err());
    }
}
