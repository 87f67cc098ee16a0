//! Homogeneous coordinates, affine charts, cross-ratios and Cartan projections.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Coordinates with absolute value at or below this are skipped when fixing
/// the sign of a representative.
pub const SIGN_TOL: f64 = 1e-12;
/// Collinearity tolerance on the sine of the angle to the spanned plane.
pub const COLLINEAR_TOL: f64 = 1e-9;
/// Products with singular value ratio beyond this use the exterior route.
pub const SVD_CONDITION_LIMIT: f64 = 1e12;

fn canonical_sign(v: &mut Vector) {
    if let Some(x) = v.iter().find(|x| x.abs() > SIGN_TOL) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

/// A point of P(R^d) stored as a unit vector with canonical sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    coords: Vector,
}

impl ProjectivePoint {
    pub fn new(v: Vector) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Precondition("zero or non-finite vector".into()));
        }
        let mut coords = v / n;
        canonical_sign(&mut coords);
        Ok(Self { coords })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(v))
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Compares canonical representatives coordinatewise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && ((&self.coords - &other.coords).amax() <= tol
                || (&self.coords + &other.coords).amax() <= tol)
    }

    /// Angle between the two lines, the round metric on P(R^d).
    pub fn angle(&self, other: &Self) -> f64 {
        let c = self.coords.dot(&other.coords).abs();
        let s = (&self.coords * self.coords.dot(&other.coords) - &other.coords).norm();
        s.atan2(c)
    }
}

/// A projective hyperplane given by a unit covector with canonical sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveHyperplane {
    covector: Vector,
}

impl ProjectiveHyperplane {
    pub fn new(v: Vector) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Precondition("zero or non-finite covector".into()));
        }
        let mut covector = v / n;
        canonical_sign(&mut covector);
        Ok(Self { covector })
    }

    pub fn covector(&self) -> &Vector {
        &self.covector
    }

    /// Value of the covector on the unit representative of `p`.
    pub fn eval(&self, p: &ProjectivePoint) -> f64 {
        self.covector.dot(p.coords())
    }

    /// Returns the covector flipped, if needed, to be nonnegative on `p`.
    pub fn oriented_towards(&self, p: &Vector) -> Vector {
        if self.covector.dot(p) < 0.0 {
            -&self.covector
        } else {
            self.covector.clone()
        }
    }
}

/// An invertible linear map acting on P(R^d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMap {
    matrix: Mat,
    det_normalized: bool,
}

impl ProjectiveMap {
    pub fn new(matrix: Mat) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::BadDimensions("map must be square".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Singular);
        }
        let det = matrix.determinant();
        if (det == 0.0 || !det.is_finite()) && dd_det(&matrix).hi() == 0.0 {
            return Err(Error::Singular);
        }
        Ok(Self {
            matrix,
            det_normalized: false,
        })
    }

    /// Rescales to |det| = 1.
    pub fn normalized(matrix: Mat) -> Result<Self> {
        let d = matrix.nrows() as f64;
        let m = Self::new(matrix)?;
        let ld = log_abs_det(&m.matrix);
        let s = (-ld / d).exp();
        Ok(Self {
            matrix: m.matrix * s,
            det_normalized: true,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: Mat::identity(d, d),
            det_normalized: true,
        }
    }

    pub fn diag(entries: &[f64]) -> Result<Self> {
        Self::new(Mat::from_diagonal(&Vector::from_column_slice(entries)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::BadDimensions("rows must form a square matrix".into()));
        }
        Self::new(Mat::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn is_det_normalized(&self) -> bool {
        self.det_normalized
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        ProjectivePoint::new(&self.matrix * p.coords()).expect("invertible map")
    }

    pub fn apply_vec(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.matrix.clone().try_inverse().ok_or(Error::Singular)?;
        Ok(Self {
            matrix: inv,
            det_normalized: self.det_normalized,
        })
    }

    /// The composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
            det_normalized: self.det_normalized && other.det_normalized,
        }
    }

    /// Pulls a covector back: the hyperplane `H` maps to `g(H)` with covector
    /// `φ ∘ g⁻¹`.
    pub fn push_covector(&self, phi: &Vector) -> Result<Vector> {
        let inv = self.matrix.clone().try_inverse().ok_or(Error::Singular)?;
        Ok(inv.transpose() * phi)
    }
}

fn dd_matrix(m: &Mat) -> Vec<Dd> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * m.ncols());
    for i in 0..d {
        for j in 0..m.ncols() {
            out.push(dd::dd(m[(i, j)]));
        }
    }
    out
}

fn dd_det(m: &Mat) -> Dd {
    dd::det(dd_matrix(m), m.nrows())
}

/// log |det m| evaluated in double-double.
pub fn log_abs_det(m: &Mat) -> f64 {
    dd::ln(dd_det(m).abs())
}

/// Sorted log singular values of a det-normalized map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanVector {
    pub mu: Vec<f64>,
}

impl CartanVector {
    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// `mu[i] - mu[j]` with 1-based indices.
    pub fn gap(&self, i: usize, j: usize) -> Result<f64> {
        mu_gap(self, i, j)
    }

    /// Gap accessor for indices known to be valid.
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.mu[i - 1] - self.mu[j - 1]
    }

    pub fn sum(&self) -> f64 {
        self.mu.iter().sum()
    }
}

/// `μ_{i,j} = μ_i - μ_j` for `1 <= i <= j <= d`.
pub fn mu_gap(v: &CartanVector, i: usize, j: usize) -> Result<f64> {
    let d = v.dim();
    if i < 1 || i > j || j > d {
        return Err(Error::IndexOutOfRange(format!("({i}, {j}) with d = {d}")));
    }
    Ok(v.mu[i - 1] - v.mu[j - 1])
}

/// Cartan projection of a single map.
pub fn cartan(g: &ProjectiveMap) -> Result<CartanVector> {
    cartan_of_product(std::slice::from_ref(g))
}

/// Cartan projection of the ordered product `factors[0] · factors[1] · …`.
pub fn cartan_of_product(factors: &[ProjectiveMap]) -> Result<CartanVector> {
    let mut acc = ProductAccumulator::new(dim_of(factors)?);
    for f in factors {
        acc.push(f.matrix())?;
    }
    acc.cartan()
}

/// Cartan projections of every nonempty prefix product of `factors`, in one
/// pass. Entry `i` is the projection of `factors[0] ⋯ factors[i]`.
pub fn cartan_of_prefixes(factors: &[ProjectiveMap]) -> Result<Vec<CartanVector>> {
    let mut acc = ProductAccumulator::new(dim_of(factors)?);
    let mut out = Vec::with_capacity(factors.len());
    for f in factors {
        acc.push(f.matrix())?;
        out.push(acc.cartan()?);
    }
    Ok(out)
}

fn dim_of(factors: &[ProjectiveMap]) -> Result<usize> {
    let first = factors.first().ok_or(Error::EmptyProduct)?;
    let d = first.dim();
    if factors.iter().any(|f| f.dim() != d) {
        return Err(Error::DimensionMismatch("factors of different sizes".into()));
    }
    Ok(d)
}

/// Index subsets of `0..d` of size `k` in lexicographic order.
pub(crate) fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// The k-th exterior power of `m` in the lexicographic basis, with every
/// minor evaluated in double-double and rounded once.
pub fn exterior_power(m: &Mat, k: usize) -> Mat {
    let d = m.nrows();
    let sets = subsets(d, k);
    let n = sets.len();
    let mut out = Mat::zeros(n, n);
    for (a, rows) in sets.iter().enumerate() {
        for (b, cols) in sets.iter().enumerate() {
            let mut sub = Vec::with_capacity(k * k);
            for &i in rows {
                for &j in cols {
                    sub.push(dd::dd(m[(i, j)]));
                }
            }
            out[(a, b)] = dd::det(sub, k).hi();
        }
    }
    out
}

/// `log ‖Λ^k g‖ - (k/d) log |det g|`, which equals `μ_1 + … + μ_k` of the
/// det-normalized map. Uses a double precision SVD of the exterior power, so
/// it is independent of the Jacobi route used by [`cartan`].
pub fn exterior_power_norm_check(g: &ProjectiveMap, k: usize) -> Result<f64> {
    let d = g.dim();
    if k < 1 || k > d {
        return Err(Error::IndexOutOfRange(format!("k = {k} with d = {d}")));
    }
    let ext = exterior_power(g.matrix(), k);
    let top = ext.singular_values().max();
    let ld = log_abs_det(g.matrix());
    Ok(top.ln() - (k as f64 / d as f64) * ld)
}

/// Running product with both a rescaled double-double copy and rescaled
/// exterior power accumulators.
struct ProductAccumulator {
    d: usize,
    prod: Option<Vec<Dd>>,
    ext: Vec<(Mat, i64)>,
    det: (i64, f64),
}

impl ProductAccumulator {
    fn new(d: usize) -> Self {
        let ext = (1..d)
            .map(|k| {
                let n = subsets(d, k).len();
                (Mat::identity(n, n), 0i64)
            })
            .collect();
        Self {
            d,
            prod: None,
            ext,
            det: (0, 0.0),
        }
    }

    fn push(&mut self, g: &Mat) -> Result<()> {
        let d = self.d;
        let gd = dd_matrix(g);
        let mut p = match self.prod.take() {
            None => gd,
            Some(p) => dd::matmul(&p, &gd, d),
        };
        let big = p.iter().map(|x| x.hi().abs()).fold(0.0, f64::max);
        if big == 0.0 || !big.is_finite() {
            return Err(Error::Singular);
        }
        let s = dd::pow2(-dd::exponent(big));
        for x in p.iter_mut() {
            *x *= s;
        }
        self.prod = Some(p);

        for (k, (acc, e)) in self.ext.iter_mut().enumerate() {
            let m = &*acc * exterior_power(g, k + 1);
            let big = m.amax();
            if big == 0.0 || !big.is_finite() {
                return Err(Error::Singular);
            }
            let ex = dd::exponent(big);
            *acc = m * dd::pow2(-ex);
            *e += ex as i64;
        }

        let det = dd_det(g).abs();
        if det.hi() == 0.0 {
            return Err(Error::Singular);
        }
        let ex = dd::exponent(det.hi());
        self.det.0 += ex as i64;
        self.det.1 += dd::ln(det * dd::pow2(-ex));
        Ok(())
    }

    fn cartan(&self) -> Result<CartanVector> {
        let d = self.d;
        let p = self.prod.as_ref().ok_or(Error::EmptyProduct)?;
        let sv = dd::singular_values(p, d, d);
        let top = sv[0].hi();
        let bottom = sv[d - 1].hi();
        if bottom > 0.0 && top.is_finite() && top / bottom < SVD_CONDITION_LIMIT {
            let logs: Vec<f64> = sv.iter().map(|s| dd::ln(*s)).collect();
            return Ok(normalize_logs(logs));
        }
        self.exterior_cartan()
    }

    fn exterior_cartan(&self) -> Result<CartanVector> {
        let d = self.d;
        let ln2 = std::f64::consts::LN_2;
        let mut levels: Vec<(i64, f64)> = vec![(0, 0.0)];
        for (acc, e) in &self.ext {
            let n = acc.nrows();
            let flat: Vec<f64> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| acc[(i, j)])
                .collect();
            let top = dd::top_singular_value_f64(&flat, n, n);
            if !(top > 0.0) || !top.is_finite() {
                return Err(Error::Singular);
            }
            levels.push((*e, top.ln()));
        }
        levels.push(self.det);
        let raw: Vec<f64> = (1..=d)
            .map(|k| {
                let (e1, s1) = levels[k];
                let (e0, s0) = levels[k - 1];
                (e1 - e0) as f64 * ln2 + (s1 - s0)
            })
            .collect();
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(Error::Singular);
        }
        Ok(normalize_logs(raw))
    }
}

fn normalize_logs(mut logs: Vec<f64>) -> CartanVector {
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    for x in logs.iter_mut() {
        *x -= mean;
    }
    logs.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    CartanVector { mu: logs }
}

/// Cross-ratio `[a, b; x, y] = |a-y| |b-x| / (|a-x| |b-y|)` of four collinear
/// points, evaluated in coordinates on their common projective line.
pub fn cross_ratio(
    a: &ProjectivePoint,
    b: &ProjectivePoint,
    x: &ProjectivePoint,
    y: &ProjectivePoint,
) -> Result<f64> {
    let d = a.dim();
    if [b, x, y].iter().any(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch("cross-ratio points".into()));
    }
    let m = Mat::from_columns(&[
        a.coords().clone(),
        b.coords().clone(),
        x.coords().clone(),
        y.coords().clone(),
    ]);
    let svd = m.clone().svd(true, false);
    let u = svd.u.ok_or(Error::DegenerateQuadruple)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let basis = Mat::from_columns(&[u.column(order[0]).into_owned(), u.column(order[1]).into_owned()]);
    let coords = basis.transpose() * &m;
    let mut worst: f64 = 0.0;
    for c in 0..4 {
        let off = (m.column(c) - &basis * coords.column(c)).norm();
        worst = worst.max(off);
    }
    if worst > COLLINEAR_TOL {
        return Err(Error::NotCollinear(worst));
    }
    let det = |i: usize, j: usize| (coords[(0, i)] * coords[(1, j)] - coords[(1, i)] * coords[(0, j)]).abs();
    let (ay, bx, ax, by) = (det(0, 3), det(1, 2), det(0, 2), det(1, 3));
    if ax <= SIGN_TOL || by <= SIGN_TOL {
        return Err(Error::DegenerateQuadruple);
    }
    Ok(ay * bx / (ax * by))
}

/// An affine chart `{φ ≠ 0}` with coordinates `(v_j / φ(v))_{j ≠ p}` for a
/// pivot index `p` with `φ_p ≠ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineChart {
    phi: Vector,
    pivot: usize,
}

impl AffineChart {
    /// Chart for the covector `phi`, pivoting on its largest entry.
    pub fn new(phi: Vector) -> Result<Self> {
        let pivot = phi.iamax();
        Self::with_pivot(phi, pivot)
    }

    pub fn with_pivot(phi: Vector, pivot: usize) -> Result<Self> {
        if pivot >= phi.len() || phi[pivot] == 0.0 || phi.len() < 2 {
            return Err(Error::Precondition("chart pivot must be a nonzero entry".into()));
        }
        Ok(Self { phi, pivot })
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &Vector {
        &self.phi
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn infinity_hyperplane(&self) -> ProjectiveHyperplane {
        ProjectiveHyperplane::new(self.phi.clone()).expect("nonzero covector")
    }

    /// Basis whose columns are `e_j - (φ_j/φ_p) e_p` for `j ≠ p`, then
    /// `e_p / φ_p`; it maps `(u, 1)` to the chart lift of `u`.
    pub fn frame(&self) -> Mat {
        let d = self.dim();
        let p = self.pivot;
        let mut f = Mat::zeros(d, d);
        let mut c = 0;
        for j in 0..d {
            if j == p {
                continue;
            }
            f[(j, c)] = 1.0;
            f[(p, c)] = -self.phi[j] / self.phi[p];
            c += 1;
        }
        f[(p, d - 1)] = 1.0 / self.phi[p];
        f
    }

    /// Representative with `φ = 1`, or `None` on the hyperplane at infinity.
    pub fn lift(&self, v: &Vector) -> Option<Vector> {
        let s = self.phi.dot(v);
        if s.abs() <= 1e-300 * v.norm() || !s.is_finite() {
            return None;
        }
        Some(v / s)
    }

    pub fn to_chart(&self, p: &ProjectivePoint) -> Option<Vector> {
        self.to_chart_vec(p.coords())
    }

    pub fn to_chart_vec(&self, v: &Vector) -> Option<Vector> {
        let l = self.lift(v)?;
        Some(Vector::from_iterator(
            self.dim() - 1,
            (0..self.dim()).filter(|&j| j != self.pivot).map(|j| l[j]),
        ))
    }

    /// Lift with `φ = 1` of the chart point `u`.
    pub fn from_chart_vec(&self, u: &Vector) -> Vector {
        let d = self.dim();
        let p = self.pivot;
        let mut v = Vector::zeros(d);
        let mut acc = 0.0;
        let mut c = 0;
        for j in 0..d {
            if j == p {
                continue;
            }
            v[j] = u[c];
            acc += self.phi[j] * u[c];
            c += 1;
        }
        v[p] = (1.0 - acc) / self.phi[p];
        v
    }

    pub fn from_chart(&self, u: &Vector) -> ProjectivePoint {
        ProjectivePoint::new(self.from_chart_vec(u)).expect("chart lift is nonzero")
    }

    /// Direction in homogeneous coordinates of the chart vector `w`.
    pub fn direction_vec(&self, w: &Vector) -> Vector {
        let d = self.dim();
        let p = self.pivot;
        let mut v = Vector::zeros(d);
        let mut acc = 0.0;
        let mut c = 0;
        for j in 0..d {
            if j == p {
                continue;
            }
            v[j] = w[c];
            acc += self.phi[j] * w[c];
            c += 1;
        }
        v[p] = -acc / self.phi[p];
        v
    }
}

/// Haar-random orthogonal matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Mat {
    let g = Mat::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    q
}

/// Random matrix `U diag(s) Vᵀ` whose singular values are spread
/// log-uniformly with `σ_1/σ_d = cond`.
pub fn random_with_condition<R: Rng + ?Sized>(rng: &mut R, d: usize, cond: f64) -> Mat {
    let u = random_orthogonal(rng, d);
    let v = random_orthogonal(rng, d);
    let lc = cond.ln();
    let mut logs: Vec<f64> = (0..d)
        .map(|i| match i {
            0 => 0.0,
            i if i == d - 1 => -lc,
            _ => -lc * rng.random::<f64>(),
        })
        .collect();
    logs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let s = Mat::from_diagonal(&Vector::from_iterator(d, logs.iter().map(|l| l.exp())));
    u * s * v.transpose()
}

/// Random point on the projective line through `a` and `b`.
pub fn point_on_line(a: &Vector, b: &Vector, t: f64) -> Vector {
    a * (1.0 - t) + b * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> ProjectivePoint {
        ProjectivePoint::from_slice(v).unwrap()
    }

    #[test]
    fn point_is_unit_and_canonical() {
        let x = p(&[0.0, -3.0, 4.0]);
        assert!((x.coords().norm() - 1.0).abs() < 1e-12);
        assert!(x.coords()[1] > 0.0);
        assert!(x.approx_eq(&p(&[0.0, 6.0, -8.0]), 1e-12));
    }

    #[test]
    fn cross_ratio_of_integers_on_a_line() {
        let (a, x, y, b) = (p(&[0.0, 1.0]), p(&[1.0, 1.0]), p(&[2.0, 1.0]), p(&[3.0, 1.0]));
        assert!((cross_ratio(&a, &b, &x, &y).unwrap() - 4.0).abs() < 1e-12);
        assert!((cross_ratio(&a, &b, &x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cross_ratio(&a, &b, &a, &y), Err(Error::DegenerateQuadruple));
    }

    #[test]
    fn cross_ratio_rejects_non_collinear() {
        let r = cross_ratio(&p(&[1., 0., 0.]), &p(&[0., 1., 0.]), &p(&[0., 0., 1.]), &p(&[1., 1., 1.]));
        assert!(matches!(r, Err(Error::NotCollinear(_))));
    }

    #[test]
    fn diagonal_gaps() {
        let c = cartan(&ProjectiveMap::diag(&[4.0, 2.0, 1.0]).unwrap()).unwrap();
        assert!((c.gap(1, 2).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((c.gap(1, 3).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!(c.sum().abs() < 1e-12);
        assert!(c.gap(2, 1).is_err());
        assert!(c.gap(1, 4).is_err());
    }

    #[test]
    fn boost_is_exact() {
        let t = 1.0f64;
        let g = ProjectiveMap::from_rows(&[
            vec![t.cosh(), 0.0, t.sinh()],
            vec![0.0, 1.0, 0.0],
            vec![t.sinh(), 0.0, t.cosh()],
        ])
        .unwrap();
        let c = cartan(&g).unwrap();
        for (m, e) in c.mu.iter().zip([1.0, 0.0, -1.0]) {
            assert!((m - e).abs() < 1e-12, "{:?}", c.mu);
        }
    }

    #[test]
    fn long_diagonal_product() {
        let g = ProjectiveMap::diag(&[2.0, 1.0, 0.5]).unwrap();
        let c = cartan_of_product(&vec![g; 60]).unwrap();
        assert!((c.g(1, 3) - 120.0 * 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn product_with_inverse_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = ProjectiveMap::new(random_with_condition(&mut rng, 4, 1e6)).unwrap();
        let c = cartan_of_product(&[g.clone(), g.inverse().unwrap()]).unwrap();
        assert!(c.mu.iter().all(|m| m.abs() < 1e-6));
    }

    #[test]
    fn prefixes_match_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fs: Vec<ProjectiveMap> = (0..30)
            .map(|_| ProjectiveMap::new(random_with_condition(&mut rng, 4, 50.0)).unwrap())
            .collect();
        let pre = cartan_of_prefixes(&fs).unwrap();
        for n in [1, 7, 19, 30] {
            let c = cartan_of_product(&fs[..n]).unwrap();
            assert_eq!(c, pre[n - 1]);
        }
    }

    #[test]
    fn exterior_check_on_diagonal() {
        let g = ProjectiveMap::diag(&[4.0, 2.0, 1.0]).unwrap();
        let c = cartan(&g).unwrap();
        let v = exterior_power_norm_check(&g, 2).unwrap();
        assert!((v - (c.mu[0] + c.mu[1])).abs() < 1e-12);
        let top = exterior_power_norm_check(&g, 3).unwrap();
        assert!(top.abs() < 1e-12);
        assert!(exterior_power_norm_check(&g, 0).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let chart = AffineChart::new(Vector::from_column_slice(&[0.2, 0.3, 1.0])).unwrap();
        let u = Vector::from_column_slice(&[0.4, -0.7]);
        let v = chart.from_chart_vec(&u);
        assert!((chart.phi().dot(&v) - 1.0).abs() < 1e-15);
        let back = chart.to_chart_vec(&v).unwrap();
        assert!((back - &u).norm() < 1e-15);
        let f = chart.frame();
        let w = &f * Vector::from_column_slice(&[0.4, -0.7, 1.0]);
        assert!((w - v).norm() < 1e-15);
    }
}
