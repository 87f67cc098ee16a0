//! Properly convex domains: polytopes, ellipsoids, sampled hulls and graph
//! domains, with membership, chord, support and face oracles.

use nalgebra::Matrix3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projlin::{AffineChart, Mat, ProjectiveHyperplane, ProjectiveMap, ProjectivePoint, Vector};

/// Tolerance of the sign tests for polytopes, ellipsoids and graph domains.
pub const EXACT_TOL: f64 = 1e-10;
/// Cosine gap below which two hull supports count as one.
const SUPPORT_MERGE_TOL: f64 = 1e-4;
/// Boundary band of hull domains, in chart units.
pub const HULL_BAND: f64 = 1e-8;
/// Turning angle below which consecutive hull edges form one segment.
pub const SEGMENT_ANGLE_TOL: f64 = 1e-6;

/// Result of a membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Whether a classification is exact or read off sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Confidence {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryClass {
    C1Extreme,
    NonC1,
    InSegmentInterior,
    InSegmentClosure,
    Unknown,
}

/// A boundary point with its supporting hyperplanes and classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub point: ProjectivePoint,
    pub supports: Vec<ProjectiveHyperplane>,
    pub class: BoundaryClass,
    pub confidence: Confidence,
}

/// A face of the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceDescriptor {
    pub dimension: usize,
    /// Basis of the projective span of the face, one vector per column.
    pub span: Vec<Vec<f64>>,
    pub active_constraints: Vec<usize>,
    pub confidence: Confidence,
}

/// A closed segment `[a, b]` contained in the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySegment {
    pub a: ProjectivePoint,
    pub b: ProjectivePoint,
    pub confidence: Confidence,
}

#[derive(Debug, Clone)]
struct Polytope {
    facets: Vec<Vector>,
}

#[derive(Debug, Clone)]
struct Ellipsoid {
    form: Mat,
}

#[derive(Debug, Clone)]
struct Hull {
    chart: AffineChart,
    /// Counterclockwise chart polygon.
    vertices: Vec<[f64; 2]>,
    /// Chart lifts of the vertices, kept at the precision of the input.
    lifts: Vec<Vector>,
    /// Homogeneous covectors of the edges, positive inside.
    facets: Vec<Vector>,
    /// The same covectors as fixed-size rows for the hot scans.
    rows: Vec<[f64; 3]>,
}

impl Hull {
    fn min_value(&self, v: &Vector) -> f64 {
        let x = [v[0], v[1], v[2]];
        self.rows.iter().map(|f| f[0] * x[0] + f[1] * x[1] + f[2] * x[2]).fold(f64::INFINITY, f64::min)
    }

    fn exit_param(&self, p: &Vector, u: &Vector) -> Option<f64> {
        let (p, u) = ([p[0], p[1], p[2]], [u[0], u[1], u[2]]);
        let mut best = f64::INFINITY;
        for f in &self.rows {
            let b = f[0] * u[0] + f[1] * u[1] + f[2] * u[2];
            if b < 0.0 {
                let s = (f[0] * p[0] + f[1] * p[1] + f[2] * p[2]) / (-b);
                if s < best {
                    best = s;
                }
            }
        }
        (best.is_finite() && best > 0.0).then_some(best)
    }
}

#[derive(Debug, Clone)]
struct Graph {
    p: f64,
    cap: f64,
    to_model: Mat,
}

#[derive(Debug, Clone)]
enum Kind {
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
    Hull(Hull),
    Graph(Graph),
}

/// A properly convex open domain in P(R^d).
#[derive(Debug, Clone)]
pub struct ConvexDomain {
    kind: Kind,
    d: usize,
    witness: Vector,
    chart: AffineChart,
    sampled: bool,
}

fn unit(v: &Vector) -> Vector {
    v / v.norm()
}

fn cross(a: &Vector, b: &Vector) -> Vector {
    let c = nalgebra::Vector3::new(a[0], a[1], a[2]).cross(&nalgebra::Vector3::new(b[0], b[1], b[2]));
    Vector::from_column_slice(c.as_slice())
}

fn numeric_rank(rows: &[Vector], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|s| **s > tol * top.max(1.0)).count()
}

fn null_space(rows: &[Vector], d: usize, tol: f64) -> Vec<Vector> {
    if rows.is_empty() {
        return (0..d).map(|i| Vector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
    }
    let m = Mat::from_fn(rows.len().max(d), d, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            out.push(vt.row(k).transpose());
        }
    }
    out
}

/// Andrew's monotone chain on chart points. Points within relative area
/// `1e-12` of an edge count as collinear and are kept as vertices, so sampled
/// boundary segments survive.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    convex_hull_2d_indices(points).into_iter().map(|i| points[i]).collect()
}

/// Indices of the counterclockwise hull vertices of [`convex_hull_2d`].
pub fn convex_hull_2d_indices(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap());
    idx.dedup_by(|a, b| {
        let (p, q) = (points[*a], points[*b]);
        (p[0] - q[0]).abs() <= 1e-13 && (p[1] - q[1]).abs() <= 1e-13
    });
    if idx.len() < 3 {
        return idx;
    }
    let turns_right = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        let det = robust::orient2d(
            robust::Coord { x: o[0], y: o[1] },
            robust::Coord { x: a[0], y: a[1] },
            robust::Coord { x: b[0], y: b[1] },
        );
        let la = ((a[0] - o[0]).powi(2) + (a[1] - o[1]).powi(2)).sqrt();
        let lb = ((b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2)).sqrt();
        if det.abs() > 1e-12 * la * lb {
            return det < 0.0;
        }
        // Collinear: keep `a` only when it lies between `o` and `b`.
        (a[0] - o[0]) * (b[0] - a[0]) + (a[1] - o[1]) * (b[1] - a[1]) <= 0.0
    };
    let chain = |order: &mut dyn Iterator<Item = usize>| {
        let mut h: Vec<usize> = Vec::new();
        for i in order {
            while h.len() >= 2 && turns_right(points[h[h.len() - 2]], points[h[h.len() - 1]], points[i]) {
                h.pop();
            }
            h.push(i);
        }
        h.pop();
        h
    };
    let mut lower = chain(&mut idx.iter().copied());
    let upper = chain(&mut idx.iter().rev().copied());
    lower.extend(upper);
    lower
}

/// Hull vertices whose unit lifts are closer than this are merged.
pub const LIFT_MERGE_TOL: f64 = 1e-11;

impl Hull {
    fn build(chart: AffineChart, chart_points: &[[f64; 2]], homogeneous: Option<&[Vector]>) -> Result<(Self, Vector)> {
        let mut idx = convex_hull_2d_indices(chart_points);
        if let Some(h) = homogeneous {
            // Nearly parallel neighbours give facets dominated by rounding.
            let close = |i: usize, j: usize| {
                let (a, b) = (unit(&h[i]), unit(&h[j]));
                cross(&a, &b).norm() < LIFT_MERGE_TOL
            };
            let mut kept: Vec<usize> = Vec::with_capacity(idx.len());
            for &i in &idx {
                if kept.last().is_none_or(|&k| !close(k, i)) {
                    kept.push(i);
                }
            }
            while kept.len() > 1 && close(kept[0], kept[kept.len() - 1]) {
                kept.pop();
            }
            idx = kept;
        }
        if idx.len() < 3 {
            return Err(Error::DegenerateDomain("hull needs three points in general position".into()));
        }
        let vertices: Vec<[f64; 2]> = idx.iter().map(|&i| chart_points[i]).collect();
        let n = vertices.len() as f64;
        let c = [
            vertices.iter().map(|v| v[0]).sum::<f64>() / n,
            vertices.iter().map(|v| v[1]).sum::<f64>() / n,
        ];
        let witness = chart.from_chart_vec(&Vector::from_column_slice(&c));
        let lifts: Vec<Vector> = idx
            .iter()
            .map(|&i| match homogeneous {
                Some(h) => chart.lift(&h[i]).expect("finite chart point"),
                None => chart.from_chart_vec(&Vector::from_column_slice(&chart_points[i])),
            })
            .collect();
        let mut facets = Vec::with_capacity(vertices.len());
        for i in 0..lifts.len() {
            let f = unit(&cross(&lifts[i], &lifts[(i + 1) % lifts.len()]));
            facets.push(if f.dot(&witness) < 0.0 { -f } else { f });
        }
        let rows = facets.iter().map(|f| [f[0], f[1], f[2]]).collect();
        Ok((
            Self {
                chart,
                vertices,
                lifts,
                facets,
                rows,
            },
            witness,
        ))
    }

    /// Maximal runs of consecutive vertices whose edges turn by less than the
    /// segment tolerance, as index lists.
    fn collinear_runs(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let dir = |i: usize| {
            let a = self.vertices[i % n];
            let b = self.vertices[(i + 1) % n];
            (b[1] - a[1]).atan2(b[0] - a[0])
        };
        let turn = |i: usize| {
            let mut t = dir(i + 1) - dir(i);
            while t > std::f64::consts::PI {
                t -= 2.0 * std::f64::consts::PI;
            }
            while t < -std::f64::consts::PI {
                t += 2.0 * std::f64::consts::PI;
            }
            t.abs()
        };
        let straight: Vec<bool> = (0..n).map(|i| turn(i) < SEGMENT_ANGLE_TOL).collect();
        if straight.iter().all(|s| *s) {
            return vec![];
        }
        let start = (0..n).find(|&i| !straight[i]).unwrap();
        let mut runs = Vec::new();
        let mut i = 1;
        while i <= n {
            let k = (start + i) % n;
            if straight[k] {
                let mut run = vec![k, (k + 1) % n, (k + 2) % n];
                let mut j = i + 1;
                while j <= n && straight[(start + j) % n] {
                    run.push((start + j + 2) % n);
                    j += 1;
                }
                runs.push(run);
                i = j;
            } else {
                i += 1;
            }
        }
        runs
    }
}

impl Graph {
    fn model_f(&self, x: f64, y: f64) -> f64 {
        (x.abs().powf(self.p) - y).max(y - self.cap + (self.cap - 1.0) * x.abs())
    }
}

/// Serialized form of a domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Polytope {
        d: usize,
        facets: Vec<Vec<f64>>,
        #[serde(default)]
        witness: Option<Vec<f64>>,
    },
    Ellipsoid {
        d: usize,
        form: Vec<Vec<f64>>,
        #[serde(default)]
        witness: Option<Vec<f64>>,
    },
    Hull {
        d: usize,
        chart: Vec<f64>,
        pivot: usize,
        vertices: Vec<[f64; 2]>,
        #[serde(default)]
        sampled: bool,
        #[serde(default)]
        witness: Option<Vec<f64>>,
    },
    Graph {
        d: usize,
        p: f64,
        cap: f64,
        to_model: Vec<Vec<f64>>,
        #[serde(default)]
        witness: Option<Vec<f64>>,
    },
}

fn rows_to_mat(rows: &[Vec<f64>], d: usize) -> Result<Mat> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::BadDimensions(format!("expected a {d}x{d} matrix")));
    }
    Ok(Mat::from_fn(d, d, |i, j| rows[i][j]))
}

fn mat_to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl ConvexDomain {
    /// Polytope `{φ_j > 0}` from oriented covectors.
    pub fn polytope(facets: Vec<Vector>) -> Result<Self> {
        let d = facets.first().map(|f| f.len()).ok_or(Error::BadDimensions("no facets".into()))?;
        if d < 2 || facets.iter().any(|f| f.len() != d || !(f.norm() > 0.0)) {
            return Err(Error::BadDimensions("facets must be nonzero d-covectors".into()));
        }
        let facets: Vec<Vector> = facets.iter().map(unit).collect();
        let phi = Mat::from_fn(facets.len(), d, |i, j| facets[i][j]);
        let ones = Vector::from_element(facets.len(), 1.0);
        let w = phi
            .clone()
            .svd(true, true)
            .solve(&ones, 1e-12)
            .map_err(|e| Error::DegenerateDomain(e.to_string()))?;
        if facets.iter().any(|f| f.dot(&w) <= 1e-9) {
            return Err(Error::DegenerateDomain("no interior witness found".into()));
        }
        Self::polytope_with_witness(facets, w)
    }

    pub fn polytope_with_witness(facets: Vec<Vector>, witness: Vector) -> Result<Self> {
        let d = witness.len();
        let facets: Vec<Vector> = facets.iter().map(unit).collect();
        if facets.iter().any(|f| f.len() != d) {
            return Err(Error::BadDimensions("facet length".into()));
        }
        if facets.iter().any(|f| f.dot(&witness) <= 0.0) {
            return Err(Error::DegenerateDomain("witness violates a facet".into()));
        }
        if numeric_rank(&facets, 1e-12) < d {
            return Err(Error::NotProperlyConvex("facet covectors do not span".into()));
        }
        let phi = facets.iter().fold(Vector::zeros(d), |acc, f| acc + f);
        let chart = AffineChart::new(phi).map_err(|_| Error::NotProperlyConvex("no bounding chart".into()))?;
        let witness = chart.lift(&witness).ok_or(Error::NotProperlyConvex("witness at infinity".into()))?;
        let dom = Self {
            kind: Kind::Polytope(Polytope { facets }),
            d,
            witness,
            chart,
            sampled: false,
        };
        dom.check_bounded()?;
        Ok(dom)
    }

    /// Ellipsoid `{vᵀ J v < 0}` for a form of signature `(d-1, 1)`.
    pub fn ellipsoid(form: Mat) -> Result<Self> {
        let d = form.nrows();
        if !form.is_square() || d < 2 {
            return Err(Error::BadDimensions("form must be square".into()));
        }
        let sym = (&form + form.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let neg: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i] < 0.0).collect();
        let pos = (0..d).filter(|&i| eig.eigenvalues[i] > 0.0).count();
        if neg.len() != 1 || pos != d - 1 {
            return Err(Error::NotProperlyConvex("form must have signature (d-1, 1)".into()));
        }
        let w = eig.eigenvectors.column(neg[0]).into_owned();
        Self::ellipsoid_with_witness(sym, w)
    }

    pub fn ellipsoid_with_witness(form: Mat, witness: Vector) -> Result<Self> {
        let d = form.nrows();
        if witness.len() != d || witness.dot(&(&form * &witness)) >= 0.0 {
            return Err(Error::DegenerateDomain("witness outside ellipsoid".into()));
        }
        let phi = -(&form * &witness);
        let chart = AffineChart::new(phi).map_err(|_| Error::NotProperlyConvex("no bounding chart".into()))?;
        let witness = chart.lift(&witness).ok_or(Error::NotProperlyConvex("witness at infinity".into()))?;
        Ok(Self {
            kind: Kind::Ellipsoid(Ellipsoid { form }),
            d,
            witness,
            chart,
            sampled: false,
        })
    }

    /// Convex hull, in the chart, of the given homogeneous points (d = 3).
    pub fn hull_from_points(chart: AffineChart, points: &[Vector], sampled: bool) -> Result<Self> {
        if chart.dim() != 3 {
            return Err(Error::BadDimensions("hull domains live in P(R^3)".into()));
        }
        let mut uv = Vec::with_capacity(points.len());
        for p in points {
            let c = chart
                .to_chart_vec(p)
                .ok_or(Error::NotProperlyConvex("hull point on the chart's infinity".into()))?;
            uv.push([c[0], c[1]]);
        }
        Self::hull_inner(chart, &uv, Some(points), sampled)
    }

    pub fn hull_from_chart_points(chart: AffineChart, uv: &[[f64; 2]], sampled: bool) -> Result<Self> {
        Self::hull_inner(chart, uv, None, sampled)
    }

    fn hull_inner(chart: AffineChart, uv: &[[f64; 2]], homogeneous: Option<&[Vector]>, sampled: bool) -> Result<Self> {
        if chart.dim() != 3 {
            return Err(Error::BadDimensions("hull domains live in P(R^3)".into()));
        }
        if uv.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::NotProperlyConvex("non-finite hull point".into()));
        }
        let (hull, witness) = Hull::build(chart.clone(), uv, homogeneous)?;
        Ok(Self {
            kind: Kind::Hull(hull),
            d: 3,
            witness,
            chart,
            sampled,
        })
    }

    fn graph_with_model(p: f64, cap: f64, to_model: Mat) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::BadExponent(p));
        }
        if !(cap > 1.0) {
            return Err(Error::DegenerateDomain("cap must exceed 1".into()));
        }
        let from_model = to_model.clone().try_inverse().ok_or(Error::Singular)?;
        let phi = to_model.transpose() * Vector::from_column_slice(&[0.0, 0.0, 1.0]);
        let chart = AffineChart::new(phi).map_err(|_| Error::NotProperlyConvex("no bounding chart".into()))?;
        let w = &from_model * Vector::from_column_slice(&[0.0, 1.0, 1.0]);
        let witness = chart.lift(&w).ok_or(Error::NotProperlyConvex("witness at infinity".into()))?;
        Ok(Self {
            kind: Kind::Graph(Graph { p, cap, to_model }),
            d: 3,
            witness,
            chart,
            sampled: false,
        })
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        let opt = |w: &Option<Vec<f64>>| w.as_ref().map(|w| Vector::from_column_slice(w));
        let check_d = |d: usize, n: usize| {
            if d != n {
                Err(Error::BadDimensions(format!("declared d = {d}, payload has {n}")))
            } else {
                Ok(())
            }
        };
        match spec {
            DomainSpec::Polytope { d, facets, witness } => {
                let fs: Vec<Vector> = facets.iter().map(|f| Vector::from_column_slice(f)).collect();
                if fs.iter().any(|f| f.len() != *d) {
                    return Err(Error::BadDimensions("facet length".into()));
                }
                match opt(witness) {
                    Some(w) => {
                        check_d(*d, w.len())?;
                        Self::polytope_with_witness(fs, w)
                    }
                    None => Self::polytope(fs),
                }
            }
            DomainSpec::Ellipsoid { d, form, witness } => {
                let m = rows_to_mat(form, *d)?;
                match opt(witness) {
                    Some(w) => {
                        check_d(*d, w.len())?;
                        Self::ellipsoid_with_witness(m, w)
                    }
                    None => Self::ellipsoid(m),
                }
            }
            DomainSpec::Hull {
                d,
                chart,
                pivot,
                vertices,
                sampled,
                ..
            } => {
                check_d(*d, 3)?;
                check_d(*d, chart.len())?;
                let c = AffineChart::with_pivot(Vector::from_column_slice(chart), *pivot)?;
                Self::hull_from_chart_points(c, vertices, *sampled)
            }
            DomainSpec::Graph { d, p, cap, to_model, .. } => {
                check_d(*d, 3)?;
                Self::graph_with_model(*p, *cap, rows_to_mat(to_model, 3)?)
            }
        }
    }

    pub fn to_spec(&self) -> DomainSpec {
        let witness = Some(self.witness.iter().copied().collect());
        match &self.kind {
            Kind::Polytope(p) => DomainSpec::Polytope {
                d: self.d,
                facets: p.facets.iter().map(|f| f.iter().copied().collect()).collect(),
                witness,
            },
            Kind::Ellipsoid(e) => DomainSpec::Ellipsoid {
                d: self.d,
                form: mat_to_rows(&e.form),
                witness,
            },
            Kind::Hull(h) => DomainSpec::Hull {
                d: 3,
                chart: h.chart.phi().iter().copied().collect(),
                pivot: h.chart.pivot(),
                vertices: h.vertices.clone(),
                sampled: self.sampled,
                witness,
            },
            Kind::Graph(g) => DomainSpec::Graph {
                d: 3,
                p: g.p,
                cap: g.cap,
                to_model: mat_to_rows(&g.to_model),
                witness,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Polytope(_) => "polytope",
            Kind::Ellipsoid(_) => "ellipsoid",
            Kind::Hull(_) => "hull",
            Kind::Graph(_) => "graph",
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        matches!(self.kind, Kind::Ellipsoid(_))
    }

    /// Interior witness as a chart lift (`φ = 1`).
    pub fn witness(&self) -> &Vector {
        &self.witness
    }

    pub fn witness_point(&self) -> ProjectivePoint {
        ProjectivePoint::new(self.witness.clone()).expect("nonzero witness")
    }

    /// The bounding chart.
    pub fn chart(&self) -> &AffineChart {
        &self.chart
    }

    /// Representative of `v` with `φ = 1` in the bounding chart.
    pub fn lift(&self, v: &Vector) -> Option<Vector> {
        self.chart.lift(v)
    }

    /// Oriented facet covectors of a polytope or hull.
    pub fn facets(&self) -> Option<&[Vector]> {
        match &self.kind {
            Kind::Polytope(p) => Some(&p.facets),
            Kind::Hull(h) => Some(&h.facets),
            _ => None,
        }
    }

    /// Oriented facets of a polytope.
    pub fn polytope_facets(&self) -> Option<&[Vector]> {
        match &self.kind {
            Kind::Polytope(p) => Some(&p.facets),
            _ => None,
        }
    }

    /// The quadratic form of an ellipsoid.
    pub fn ellipsoid_form(&self) -> Option<&Mat> {
        match &self.kind {
            Kind::Ellipsoid(e) => Some(&e.form),
            _ => None,
        }
    }

    /// Hull vertices as homogeneous chart lifts.
    pub fn hull_vertices(&self) -> Option<Vec<Vector>> {
        match &self.kind {
            Kind::Hull(h) => Some(h.lifts.clone()),
            _ => None,
        }
    }

    pub fn hull_chart_vertices(&self) -> Option<&[[f64; 2]]> {
        match &self.kind {
            Kind::Hull(h) => Some(&h.vertices),
            _ => None,
        }
    }

    /// Exponent and model map of a graph domain.
    pub fn graph_params(&self) -> Option<(f64, f64, &Mat)> {
        match &self.kind {
            Kind::Graph(g) => Some((g.p, g.cap, &g.to_model)),
            _ => None,
        }
    }

    fn check_bounded(&self) -> Result<()> {
        if let Kind::Polytope(p) = &self.kind {
            // Every direction with φ(u) = 0 must leave through some facet.
            let basis = null_space(std::slice::from_ref(self.chart.phi()), self.d, 1e-12);
            for b in basis {
                for s in [1.0, -1.0] {
                    let u = &b * s;
                    if p.facets.iter().all(|f| f.dot(&u) >= -1e-12) {
                        return Err(Error::NotProperlyConvex("unbounded in the chart".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Membership with the representation's tolerance.
    pub fn contains(&self, p: &ProjectivePoint) -> Location {
        self.locate_vec(p.coords())
    }

    pub fn locate_vec(&self, v: &Vector) -> Location {
        let Some(l) = self.lift(v) else {
            return Location::Exterior;
        };
        match &self.kind {
            Kind::Polytope(p) => {
                let lu = unit(&l);
                let m = p.facets.iter().map(|f| f.dot(&lu)).fold(f64::INFINITY, f64::min);
                classify(m, EXACT_TOL)
            }
            Kind::Ellipsoid(e) => {
                let lu = unit(&l);
                classify(-lu.dot(&(&e.form * &lu)), EXACT_TOL)
            }
            Kind::Hull(h) => {
                let lu = unit(&l);
                classify(h.min_value(&lu), HULL_BAND)
            }
            Kind::Graph(g) => {
                let m = &g.to_model * &l;
                if m[2] <= 0.0 {
                    return Location::Exterior;
                }
                classify(-g.model_f(m[0] / m[2], m[1] / m[2]), EXACT_TOL)
            }
        }
    }

    pub fn is_interior(&self, v: &Vector) -> bool {
        self.locate_vec(v) == Location::Interior
    }

    /// Signed membership margin without tolerance band, positive inside.
    /// Evaluated on homogeneous data so that points close to a boundary
    /// point with simple coordinates keep their relative precision.
    pub fn margin(&self, v: &Vector) -> f64 {
        let Some(l) = self.lift(v) else {
            return f64::NEG_INFINITY;
        };
        let lu = unit(&l);
        match &self.kind {
            Kind::Polytope(p) => p.facets.iter().map(|f| f.dot(&lu)).fold(f64::INFINITY, f64::min),
            Kind::Hull(h) => h.min_value(&lu),
            Kind::Ellipsoid(e) => -lu.dot(&(&e.form * &lu)),
            Kind::Graph(g) => {
                let m = &g.to_model * &l;
                if m[2] <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                -g.model_f(m[0] / m[2], m[1] / m[2])
            }
        }
    }

    /// Strict membership in the open domain, without tolerance band.
    pub fn is_inside(&self, v: &Vector) -> bool {
        self.margin(v) > 0.0
    }

    /// Smallest `s > 0` with `p + s u` on the boundary, for a chart lift `p`
    /// of an interior point and a direction with `φ(u) = 0`.
    pub fn exit_param(&self, p: &Vector, u: &Vector) -> Option<f64> {
        match &self.kind {
            Kind::Polytope(poly) => min_ratio(&poly.facets, p, u),
            Kind::Hull(h) => h.exit_param(p, u),
            Kind::Ellipsoid(e) => {
                let ju = &e.form * u;
                let a = u.dot(&ju);
                let b = p.dot(&ju);
                let c = p.dot(&(&e.form * p));
                let disc = b * b - a * c;
                if disc < 0.0 {
                    return None;
                }
                let r = disc.sqrt();
                let s = if b >= 0.0 {
                    -c / (b + r)
                } else {
                    if a <= 0.0 {
                        return None;
                    }
                    (r - b) / a
                };
                (s > 0.0 && s.is_finite()).then_some(s)
            }
            Kind::Graph(g) => {
                let mp = &g.to_model * p;
                let mu = &g.to_model * u;
                let (x0, y0) = (mp[0] / mp[2], mp[1] / mp[2]);
                let (ux, uy) = (mu[0] / mp[2], mu[1] / mp[2]);
                let speed = (ux * ux + uy * uy).sqrt();
                if !(speed > 0.0) {
                    return None;
                }
                let f = |s: f64| g.model_f(x0 + s * ux, y0 + s * uy);
                let mut hi = 4.0 * g.cap.max(1.0) / speed;
                while f(hi) < 0.0 {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return None;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..2000 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if f(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            }
        }
    }

    /// Endpoints `(a, b)` of the chord through interior points `x ≠ y`,
    /// ordered `a, x, y, b`.
    pub fn chord(&self, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<(ProjectivePoint, ProjectivePoint)> {
        let (a, b) = self.chord_vec(x.coords(), y.coords())?;
        Ok((ProjectivePoint::new(a)?, ProjectivePoint::new(b)?))
    }

    /// Chord endpoints as chart lifts, with the exit parameters `(α, β)` so
    /// that `a = x̃ - α(ỹ - x̃)` and `b = ỹ + β(ỹ - x̃)`.
    pub fn chord_params(&self, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
        if !self.is_inside(x) || !self.is_inside(y) {
            return Err(Error::NotInterior);
        }
        let xl = self.lift(x).ok_or(Error::NotInterior)?;
        let yl = self.lift(y).ok_or(Error::NotInterior)?;
        let u = &yl - &xl;
        if u.norm() <= 1e-15 * xl.norm() {
            return Err(Error::CoincidentPoints);
        }
        let alpha = self.exit_param(&xl, &(-&u)).ok_or(Error::NotProperlyConvex("chord does not exit".into()))?;
        let beta = self.exit_param(&yl, &u).ok_or(Error::NotProperlyConvex("chord does not exit".into()))?;
        Ok((alpha, beta))
    }

    pub fn chord_vec(&self, x: &Vector, y: &Vector) -> Result<(Vector, Vector)> {
        let (alpha, beta) = self.chord_params(x, y)?;
        let xl = self.lift(x).unwrap();
        let yl = self.lift(y).unwrap();
        let u = &yl - &xl;
        Ok((&xl - &u * alpha, &yl + &u * beta))
    }

    /// Supporting hyperplanes at a boundary point.
    pub fn supporting_hyperplanes(&self, z: &ProjectivePoint) -> Result<Vec<ProjectiveHyperplane>> {
        if self.contains(z) != Location::Boundary {
            return Err(Error::NotOnBoundary);
        }
        let l = self.lift(z.coords()).ok_or(Error::NotOnBoundary)?;
        let lu = unit(&l);
        let covs: Vec<Vector> = match &self.kind {
            Kind::Polytope(p) => p.facets.iter().filter(|f| f.dot(&lu).abs() <= 1e-8).cloned().collect(),
            Kind::Ellipsoid(e) => vec![-(&e.form * &lu)],
            Kind::Hull(h) => {
                // Fine samplings of a smooth arc give many nearly parallel facets; keep one per direction.
                let mut kept: Vec<Vector> = Vec::new();
                for f in h.facets.iter().filter(|f| f.dot(&lu).abs() <= HULL_BAND) {
                    let fu = unit(f);
                    if kept.iter().all(|k| (1.0 - unit(k).dot(&fu)) > SUPPORT_MERGE_TOL) {
                        kept.push(f.clone());
                    }
                }
                kept
            }
            Kind::Graph(g) => {
                let m = &g.to_model * &l;
                let (x, y) = (m[0] / m[2], m[1] / m[2]);
                let mut model_covs = Vec::new();
                let on_curve = (x.abs().powf(g.p) - y).abs() <= 1e-8 && x.abs() <= 1.0 + 1e-12;
                let h1 = g.cap - 1.0;
                let on_right_cap = (y - g.cap + h1 * x).abs() <= 1e-8 && x >= -1e-12;
                let on_left_cap = (y - g.cap - h1 * x).abs() <= 1e-8 && x <= 1e-12;
                if on_curve {
                    let m = g.p * x.signum() * x.abs().powf(g.p - 1.0);
                    model_covs.push(Vector::from_column_slice(&[-m, 1.0, m * x - y]));
                }
                if on_right_cap {
                    model_covs.push(Vector::from_column_slice(&[-h1, -1.0, g.cap]));
                }
                if on_left_cap {
                    model_covs.push(Vector::from_column_slice(&[h1, -1.0, g.cap]));
                }
                model_covs.iter().map(|c| g.to_model.transpose() * c).collect()
            }
        };
        if covs.is_empty() {
            return Err(Error::NotOnBoundary);
        }
        covs.into_iter().map(ProjectiveHyperplane::new).collect()
    }

    /// Orients a support covector to be nonnegative on the interior.
    pub fn orient(&self, h: &ProjectiveHyperplane) -> Vector {
        h.oriented_towards(&self.witness)
    }

    /// Boundary point with supports and a classification.
    pub fn boundary_point(&self, z: &ProjectivePoint) -> Result<BoundaryPoint> {
        let supports = self.supporting_hyperplanes(z)?;
        let face = self.face_of(z).ok();
        let class = match (&face, supports.len()) {
            (_, n) if n > 1 => BoundaryClass::NonC1,
            (Some(f), _) if f.dimension > 0 => BoundaryClass::InSegmentInterior,
            (Some(_), _) => {
                let in_closure = self
                    .boundary_segments()
                    .map(|segs| segs.iter().any(|s| s.a.approx_eq(z, 1e-8) || s.b.approx_eq(z, 1e-8)))
                    .unwrap_or(false);
                if in_closure {
                    BoundaryClass::InSegmentClosure
                } else {
                    BoundaryClass::C1Extreme
                }
            }
            (None, _) => BoundaryClass::Unknown,
        };
        let confidence = if self.sampled || matches!(self.kind, Kind::Hull(_)) {
            Confidence::Sampled
        } else {
            Confidence::Exact
        };
        Ok(BoundaryPoint {
            point: z.clone(),
            supports,
            class,
            confidence,
        })
    }

    /// The open face containing a boundary point.
    pub fn face_of(&self, z: &ProjectivePoint) -> Result<FaceDescriptor> {
        if self.contains(z) != Location::Boundary {
            return Err(Error::NotOnBoundary);
        }
        let l = unit(&self.lift(z.coords()).ok_or(Error::NotOnBoundary)?);
        let cols = |vs: Vec<Vector>| vs.iter().map(|v| v.iter().copied().collect()).collect();
        match &self.kind {
            Kind::Polytope(p) => {
                let active: Vec<usize> = (0..p.facets.len()).filter(|&i| p.facets[i].dot(&l).abs() <= 1e-8).collect();
                let rows: Vec<Vector> = active.iter().map(|&i| p.facets[i].clone()).collect();
                let r = numeric_rank(&rows, 1e-9);
                Ok(FaceDescriptor {
                    dimension: self.d - 1 - r,
                    span: cols(null_space(&rows, self.d, 1e-9)),
                    active_constraints: active,
                    confidence: Confidence::Exact,
                })
            }
            Kind::Ellipsoid(_) => Ok(FaceDescriptor {
                dimension: 0,
                span: cols(vec![l]),
                active_constraints: vec![],
                confidence: Confidence::Exact,
            }),
            Kind::Hull(_) | Kind::Graph(_) => {
                let conf = if matches!(self.kind, Kind::Hull(_)) {
                    Confidence::Sampled
                } else {
                    Confidence::Exact
                };
                for s in self.boundary_segments()? {
                    if open_segment_contains(&s, z) {
                        return Ok(FaceDescriptor {
                            dimension: 1,
                            span: cols(vec![s.a.coords().clone(), s.b.coords().clone()]),
                            active_constraints: vec![],
                            confidence: conf,
                        });
                    }
                }
                Ok(FaceDescriptor {
                    dimension: 0,
                    span: cols(vec![l]),
                    active_constraints: vec![],
                    confidence: conf,
                })
            }
        }
    }

    /// Maximal boundary segments: the edges of a polytope, sampled collinear
    /// runs of a hull, the cap of a graph domain, none for an ellipsoid.
    pub fn boundary_segments(&self) -> Result<Vec<BoundarySegment>> {
        let pt = |v: Vector| ProjectivePoint::new(v).expect("nonzero");
        match &self.kind {
            Kind::Ellipsoid(_) => Ok(vec![]),
            Kind::Polytope(p) => {
                let verts = polytope_vertices(&p.facets, self.d, &self.chart);
                let mut out = Vec::new();
                for i in 0..verts.len() {
                    for j in (i + 1)..verts.len() {
                        let common: Vec<Vector> = p
                            .facets
                            .iter()
                            .filter(|f| f.dot(&unit(&verts[i])).abs() <= 1e-9 && f.dot(&unit(&verts[j])).abs() <= 1e-9)
                            .cloned()
                            .collect();
                        if numeric_rank(&common, 1e-9) == self.d - 2 {
                            out.push(BoundarySegment {
                                a: pt(verts[i].clone()),
                                b: pt(verts[j].clone()),
                                confidence: Confidence::Exact,
                            });
                        }
                    }
                }
                Ok(out)
            }
            Kind::Hull(h) => Ok(h
                .collinear_runs()
                .into_iter()
                .filter(|r| r.len() >= 3)
                .map(|r| {
                    let a = h.vertices[r[0]];
                    let b = h.vertices[*r.last().unwrap()];
                    BoundarySegment {
                        a: h.chart.from_chart(&Vector::from_column_slice(&a)),
                        b: h.chart.from_chart(&Vector::from_column_slice(&b)),
                        confidence: Confidence::Sampled,
                    }
                })
                .collect()),
            Kind::Graph(g) => {
                let inv = g.to_model.clone().try_inverse().ok_or(Error::Singular)?;
                let m = |x: f64, y: f64| pt(&inv * Vector::from_column_slice(&[x, y, 1.0]));
                Ok(vec![
                    BoundarySegment {
                        a: m(-1.0, 1.0),
                        b: m(0.0, g.cap),
                        confidence: Confidence::Exact,
                    },
                    BoundarySegment {
                        a: m(0.0, g.cap),
                        b: m(1.0, 1.0),
                        confidence: Confidence::Exact,
                    },
                ])
            }
        }
    }

    /// The image domain `g·Ω`.
    pub fn transform(&self, g: &ProjectiveMap) -> Result<Self> {
        let inv = g.inverse()?;
        let inv_t = inv.matrix().transpose();
        let w = g.apply_vec(&self.witness);
        match &self.kind {
            Kind::Polytope(p) => Self::polytope_with_witness(p.facets.iter().map(|f| &inv_t * f).collect(), w),
            Kind::Ellipsoid(e) => {
                let form = &inv_t * &e.form * inv.matrix();
                Self::ellipsoid_with_witness((&form + form.transpose()) * 0.5, w)
            }
            Kind::Hull(h) => {
                let phi = &inv_t * h.chart.phi();
                let chart = AffineChart::new(phi)?;
                let pts: Vec<Vector> = self
                    .hull_vertices()
                    .unwrap()
                    .iter()
                    .map(|v| g.apply_vec(v))
                    .collect();
                Self::hull_from_points(chart, &pts, self.sampled)
            }
            Kind::Graph(gr) => Self::graph_with_model(gr.p, gr.cap, &gr.to_model * inv.matrix()),
        }
    }

    /// `n` boundary points (unit vectors) reached by rays from the witness,
    /// plus hull vertices or polytope vertices. Directions are deterministic.
    pub fn boundary_samples(&self, n: usize) -> Vec<Vector> {
        let d = self.d;
        let basis = null_space(std::slice::from_ref(self.chart.phi()), d, 1e-12);
        let dirs: Vec<Vector> = if d == 3 {
            (0..n)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                    &basis[0] * t.cos() + &basis[1] * t.sin()
                })
                .collect()
        } else {
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..n)
                .map(|i| {
                    let coeffs: Vec<f64> = (0..basis.len())
                        .map(|k| ((i as f64 + 0.5) * golden.powi(k as i32 + 1) * std::f64::consts::TAU).sin())
                        .collect();
                    basis.iter().zip(coeffs).fold(Vector::zeros(d), |acc, (b, c)| acc + b * c)
                })
                .collect()
        };
        let mut out: Vec<Vector> = dirs
            .iter()
            .filter_map(|u| self.exit_param(&self.witness, u).map(|s| unit(&(&self.witness + u * s))))
            .collect();
        if let Some(vs) = self.hull_vertices() {
            out.extend(vs.iter().map(unit));
        }
        if let Kind::Polytope(p) = &self.kind {
            out.extend(polytope_vertices(&p.facets, d, &self.chart).iter().map(unit));
        }
        out
    }

    /// Random interior point: the witness moved a random fraction of the way
    /// to the boundary along a random chart direction.
    pub fn random_interior<R: Rng + ?Sized>(&self, rng: &mut R, max_fraction: f64) -> Vector {
        let basis = null_space(std::slice::from_ref(self.chart.phi()), self.d, 1e-12);
        loop {
            let u = basis
                .iter()
                .fold(Vector::zeros(self.d), |acc, b| acc + b * rng.random_range(-1.0..1.0));
            if u.norm() < 1e-3 {
                continue;
            }
            if let Some(s) = self.exit_param(&self.witness, &u) {
                let t = rng.random::<f64>() * max_fraction;
                return &self.witness + u * (s * t);
            }
        }
    }
}

fn classify(margin: f64, tol: f64) -> Location {
    if margin > tol {
        Location::Interior
    } else if margin >= -tol {
        Location::Boundary
    } else {
        Location::Exterior
    }
}

fn min_ratio(facets: &[Vector], p: &Vector, u: &Vector) -> Option<f64> {
    let mut best = f64::INFINITY;
    for f in facets {
        let b = f.dot(u);
        if b < 0.0 {
            let s = f.dot(p) / (-b);
            if s < best {
                best = s;
            }
        }
    }
    (best.is_finite() && best > 0.0).then_some(best)
}

fn open_segment_contains(s: &BoundarySegment, z: &ProjectivePoint) -> bool {
    let (a, b, q) = (s.a.coords(), s.b.coords(), z.coords());
    let m = Mat::from_columns(&[a.clone(), b.clone()]);
    let Ok(c) = m.clone().svd(true, true).solve(q, 1e-14) else {
        return false;
    };
    let resid = (&m * &c - q).norm();
    resid <= 1e-8 && c[0] * c[1] > 0.0 && c[0].abs().min(c[1].abs()) > 1e-8
}

/// Vertices of a polytope as chart lifts.
fn polytope_vertices(facets: &[Vector], d: usize, chart: &AffineChart) -> Vec<Vector> {
    let n = facets.len();
    let mut out: Vec<Vector> = Vec::new();
    let sets = crate::projlin::subsets(n, d - 1);
    for set in sets {
        let rows: Vec<Vector> = set.iter().map(|&i| facets[i].clone()).collect();
        if numeric_rank(&rows, 1e-10) != d - 1 {
            continue;
        }
        let ns = null_space(&rows, d, 1e-10);
        let Some(v) = ns.first() else { continue };
        let Some(l) = chart.lift(v) else { continue };
        let lu = unit(&l);
        if facets.iter().all(|f| f.dot(&lu) >= -1e-10) && !out.iter().any(|o| (o - &l).norm() <= 1e-9) {
            out.push(l);
        }
    }
    out
}

/// Standard `k`-simplex spanned by `[e_1], …, [e_{k+1}]`, as a polytope in
/// its own span P(R^{k+1}).
pub fn build_simplex(k: usize, d: usize) -> Result<ConvexDomain> {
    if k < 1 || k + 1 > d {
        return Err(Error::BadDimensions(format!("k = {k}, d = {d}")));
    }
    let n = k + 1;
    let facets = (0..n).map(|i| Vector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
    ConvexDomain::polytope_with_witness(facets, Vector::from_element(n, 1.0))
}

/// Klein model: `x_1² + … + x_{d-1}² < x_d²`.
pub fn build_klein_ball(d: usize) -> Result<ConvexDomain> {
    if d < 2 {
        return Err(Error::BadDimensions(format!("d = {d}")));
    }
    let mut j = Mat::identity(d, d);
    j[(d - 1, d - 1)] = -1.0;
    let mut w = Vector::zeros(d);
    w[d - 1] = 1.0;
    ConvexDomain::ellipsoid_with_witness(j, w)
}

/// Convex hull of the Klein disk and the pole `ℓ* = [0:1:0]` of the
/// horizontal diameter, in the chart `y + 2z = 1`. The disk and the two
/// tangent segments `x = ±1` are sampled with `n` points each.
pub fn build_disk_pole_hull_with(n: usize) -> Result<ConvexDomain> {
    let chart = AffineChart::new(Vector::from_column_slice(&[0.0, 1.0, 2.0]))?;
    let mut pts = Vec::new();
    for i in 0..n {
        let t = std::f64::consts::TAU * i as f64 / n as f64;
        pts.push(Vector::from_column_slice(&[t.cos(), t.sin(), 1.0]));
    }
    for i in 0..n {
        let s = i as f64 / n as f64;
        let t = s / (1.0 - s);
        for x in [-1.0, 1.0] {
            pts.push(Vector::from_column_slice(&[x, t, 1.0]));
        }
    }
    pts.push(Vector::from_column_slice(&[0.0, 1.0, 0.0]));
    ConvexDomain::hull_from_points(chart, &pts, true)
}

pub fn build_disk_pole_hull() -> Result<ConvexDomain> {
    build_disk_pole_hull_with(720)
}

/// Graph domain `{|x|^p < y < cap - (cap-1)|x|}` in the standard chart.
pub fn build_graph_domain(p: f64) -> Result<ConvexDomain> {
    ConvexDomain::graph_with_model(p, 2.0, Mat::identity(3, 3))
}

/// A rank-3 reflection group with its sampled limit-set hull.
#[derive(Debug, Clone)]
pub struct CoxeterHull {
    pub domain: ConvexDomain,
    pub generators: Vec<ProjectiveMap>,
    /// Attracting fixed points with the length of the word producing them.
    pub fixed_points: Vec<(Vector, usize)>,
    pub cartan_matrix: Mat,
}

/// Cartan matrix entries `[c12, c13, c21, c23, c31, c32]` for the symmetric
/// choice `c_ij = -2 cos(π/m_ij)`.
pub fn symmetric_cartan(orders: (u32, u32, u32)) -> [f64; 6] {
    let c = |m: u32| -2.0 * (std::f64::consts::PI / m as f64).cos();
    let (m12, m13, m23) = orders;
    [c(m12), c(m13), c(m12), c(m23), c(m13), c(m23)]
}

/// Asymmetric (3,3,4) Cartan data with `c12 = -2`, `c21 = -1/2`.
pub fn asymmetric_334() -> [f64; 6] {
    let s = symmetric_cartan((3, 3, 4));
    [-2.0, s[1], -0.5, s[3], s[4], s[5]]
}

/// Attracting fixed point of `m` (unit vector) and the top modulus ratio,
/// oriented so that it lies on the side of `m^n x0`.
pub fn attracting_fixed_point(m: &Mat, x0: &Vector) -> Option<(Vector, f64)> {
    let d = m.nrows();
    let eig = m.clone().complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let ratio = if d > 1 { mods[0] / mods[1] } else { f64::INFINITY };
    if !(ratio > 1.0 + 1e-6) {
        return None;
    }
    let mut p = m / m.amax();
    for _ in 0..64 {
        p = &p * &p;
        let s = p.amax();
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        p /= s;
    }
    let mut v = &p * x0;
    if !(v.norm() > 0.0) {
        return None;
    }
    v = unit(&v);
    for _ in 0..200 {
        let w = m * &v;
        v = unit(&w);
    }
    let v = if v.dot(&(&p * x0)) < 0.0 { -v } else { v };
    Some((v, ratio))
}

/// Reflection group `σ_i = I - v_i ⊗ e_i*` for the Cartan matrix with the
/// given off-diagonal entries, and the hull of attracting fixed points of
/// proximal words up to `depth`.
pub fn build_coxeter_hull(orders: (u32, u32, u32), offdiag: [f64; 6], depth: usize) -> Result<CoxeterHull> {
    let (m12, m13, m23) = orders;
    if [m12, m13, m23].iter().any(|m| *m < 2) {
        return Err(Error::BadCartanData("orders must be at least 2".into()));
    }
    if 1.0 / m12 as f64 + 1.0 / m13 as f64 + 1.0 / m23 as f64 >= 1.0 {
        return Err(Error::BadCartanData("orders do not give a hyperbolic triangle group".into()));
    }
    let [c12, c13, c21, c23, c31, c32] = offdiag;
    let a = Mat::from_row_slice(3, 3, &[2.0, c12, c13, c21, 2.0, c23, c31, c32, 2.0]);
    for (i, j, m) in [(0, 1, m12), (0, 2, m13), (1, 2, m23)] {
        if !(a[(i, j)] < 0.0 && a[(j, i)] < 0.0) {
            return Err(Error::BadCartanData("off-diagonal entries must be negative".into()));
        }
        let target = 4.0 * (std::f64::consts::PI / m as f64).cos().powi(2);
        if (a[(i, j)] * a[(j, i)] - target).abs() > 1e-9 {
            return Err(Error::BadCartanData(format!("c{}{}·c{}{} ≠ 4cos²(π/{m})", i + 1, j + 1, j + 1, i + 1)));
        }
    }
    let gens: Vec<ProjectiveMap> = (0..3)
        .map(|i| {
            let mut s = Mat::identity(3, 3);
            for r in 0..3 {
                s[(r, i)] -= a[(r, i)];
            }
            ProjectiveMap::new(s)
        })
        .collect::<Result<_>>()?;
    let x0 = Vector::from_element(3, 1.0);
    let elems = crate::groups::reduced_words_involutions(&gens, depth, 200_000)?;
    let mut fixed: Vec<(Vector, usize)> = Vec::new();
    for (word, m) in &elems {
        if word.is_empty() {
            continue;
        }
        if let Some((v, _)) = attracting_fixed_point(m, &x0) {
            if !fixed.iter().any(|(f, _)| (f - &v).norm() <= 1e-12) {
                fixed.push((v, word.len()));
            }
        }
    }
    if fixed.len() < 8 {
        return Err(Error::NotProximalEnough(format!("{} fixed points at depth {depth}", fixed.len())));
    }
    let phi = max_margin_covector(&fixed.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>())
        .ok_or(Error::NotProperlyConvex("fixed points not in a half-space".into()))?;
    let chart = AffineChart::new(phi)?;
    let pts: Vec<Vector> = fixed.iter().map(|(v, _)| v.clone()).collect();
    let domain = ConvexDomain::hull_from_points(chart, &pts, true)?;
    Ok(CoxeterHull {
        domain,
        generators: gens,
        fixed_points: fixed,
        cartan_matrix: a,
    })
}

/// A covector positive on every given unit vector, pushed towards the
/// maximal-margin direction by perceptron steps.
pub fn max_margin_covector(points: &[Vector]) -> Option<Vector> {
    let d = points.first()?.len();
    let mut phi = unit(&points.iter().fold(Vector::zeros(d), |acc, p| acc + unit(p)));
    for it in 0..5000 {
        let (i, m) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, phi.dot(&unit(p))))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if m > 0.05 && it > 50 {
            break;
        }
        let step = 0.5 / (1.0 + it as f64).sqrt();
        phi = unit(&(&phi + unit(&points[i]) * step));
    }
    points.iter().all(|p| phi.dot(&unit(p)) > 0.0).then_some(phi)
}

/// Least-squares conic through chart points; returns the coefficients of
/// `a x² + b xy + c y² + d x + e y + f` and the largest first-order
/// geometric distance of the points to the conic.
pub fn fit_conic(points: &[[f64; 2]]) -> ([f64; 6], f64) {
    let n = points.len();
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    let scale = points
        .iter()
        .map(|p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt())
        .fold(0.0, f64::max)
        .max(1e-300);
    let q: Vec<[f64; 2]> = points.iter().map(|p| [(p[0] - cx) / scale, (p[1] - cy) / scale]).collect();
    let m = Mat::from_fn(n.max(6), 6, |i, j| {
        if i >= n {
            return 0.0;
        }
        let [x, y] = q[i];
        [x * x, x * y, y * y, x, y, 1.0][j]
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let k = svd.singular_values.imin();
    let c: Vec<f64> = vt.row(k).iter().copied().collect();
    let mut worst: f64 = 0.0;
    for [x, y] in &q {
        let val = c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y + c[5];
        let gx = 2.0 * c[0] * x + c[1] * y + c[3];
        let gy = c[1] * x + 2.0 * c[2] * y + c[4];
        let g = (gx * gx + gy * gy).sqrt().max(1e-300);
        worst = worst.max((val / g).abs() * scale);
    }
    ([c[0], c[1], c[2], c[3], c[4], c[5]], worst)
}

/// Matrix of a 3x3 map as a nalgebra static matrix.
pub fn to_matrix3(m: &Mat) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> ProjectivePoint {
        ProjectivePoint::from_slice(v).unwrap()
    }

    #[test]
    fn simplex_membership() {
        let s = build_simplex(2, 3).unwrap();
        assert_eq!(s.contains(&p(&[1., 1., 1.])), Location::Interior);
        assert_eq!(s.contains(&p(&[1., 0., 0.])), Location::Boundary);
        assert_eq!(s.contains(&p(&[1., -1., 1.])), Location::Exterior);
        assert_eq!(s.polytope_facets().unwrap().len(), 3);
        assert!(build_simplex(3, 3).is_err());
    }

    #[test]
    fn disk_chord_is_the_diameter() {
        let k = build_klein_ball(3).unwrap();
        assert_eq!(k.contains(&p(&[2., 0., 1.])), Location::Exterior);
        assert_eq!(k.contains(&p(&[1., 0., 1.])), Location::Boundary);
        let (a, b) = k.chord(&p(&[0., 0., 1.]), &p(&[0.5, 0., 1.])).unwrap();
        assert!(a.approx_eq(&p(&[-1., 0., 1.]), 1e-12));
        assert!(b.approx_eq(&p(&[1., 0., 1.]), 1e-12));
    }

    #[test]
    fn simplex_supports_and_faces() {
        let s = build_simplex(2, 3).unwrap();
        assert_eq!(s.supporting_hyperplanes(&p(&[1., 0., 0.])).unwrap().len(), 2);
        assert_eq!(s.supporting_hyperplanes(&p(&[1., 1., 0.])).unwrap().len(), 1);
        assert_eq!(s.face_of(&p(&[1., 1., 0.])).unwrap().dimension, 1);
        assert_eq!(s.face_of(&p(&[1., 0., 0.])).unwrap().dimension, 0);
        assert_eq!(s.boundary_segments().unwrap().len(), 3);
        assert_eq!(s.supporting_hyperplanes(&p(&[1., 1., 1.])), Err(Error::NotOnBoundary));
    }

    #[test]
    fn ellipse_is_strictly_convex() {
        let k = build_klein_ball(3).unwrap();
        let z = p(&[0.6, 0.8, 1.0]);
        assert_eq!(k.supporting_hyperplanes(&z).unwrap().len(), 1);
        assert_eq!(k.face_of(&z).unwrap().dimension, 0);
        assert!(k.boundary_segments().unwrap().is_empty());
    }

    #[test]
    fn hull_keeps_collinear_points() {
        let pts = [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.4, 0.6]];
        let h = convex_hull_2d(&pts);
        assert_eq!(h.len(), 5);
    }

    #[test]
    fn graph_domain_origin() {
        let g = build_graph_domain(2.0).unwrap();
        let o = p(&[0., 0., 1.]);
        assert_eq!(g.contains(&o), Location::Boundary);
        let s = g.supporting_hyperplanes(&o).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].covector()[0].abs() < 1e-15 && s[0].covector()[2].abs() < 1e-15);
        assert_eq!(g.supporting_hyperplanes(&p(&[1., 1., 1.])).unwrap().len(), 2);
        assert!(matches!(build_graph_domain(1.0), Err(Error::BadExponent(_))));
    }

    #[test]
    fn spec_round_trip() {
        let k = build_klein_ball(3).unwrap();
        let json = serde_json::to_string(&k.to_spec()).unwrap();
        assert!(json.contains("\"type\":\"ellipsoid\""));
        let back = ConvexDomain::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.contains(&p(&[0.3, 0.2, 1.0])), Location::Interior);
    }
}
