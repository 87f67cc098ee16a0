//! Ready-made domains, groups and basepoints for the experiments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::{
    asymmetric_334, attracting_fixed_point, build_coxeter_hull, max_margin_covector, ConvexDomain, CoxeterHull,
};
use crate::error::{Error, Result};
use crate::groups::{flat_direction, FlatDirection, GeneratorSet};
use crate::hilbert::Geodesic;
use crate::projlin::{random_orthogonal, AffineChart, Mat, ProjectiveMap, Vector};

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

/// Klein disk in the light-cone frame `(x + z, y, z - x)`, where it is
/// `b² < 4ac` and the boost along the horizontal diameter is diagonal.
pub fn klein_light_cone() -> Result<ConvexDomain> {
    let form = Mat::from_row_slice(3, 3, &[0.0, 0.0, -2.0, 0.0, 1.0, 0.0, -2.0, 0.0, 0.0]);
    ConvexDomain::ellipsoid_with_witness(form, v(&[1.0, 0.0, 1.0]))
}

/// The boost of translation length `t` in the light-cone frame.
pub fn light_cone_boost(t: f64) -> Result<ProjectiveMap> {
    ProjectiveMap::diag(&[t.exp(), 1.0, (-t).exp()])
}

/// Klein disk with the boost `diag(2, 1, 1/2)` (translation `log 2`), the
/// basepoint on its axis and the axis ray towards `[1:0:0]`.
pub struct KleinScenario {
    pub domain: ConvexDomain,
    pub gens: GeneratorSet,
    pub x0: Vector,
    pub ray: Geodesic,
    pub translation: f64,
}

pub fn klein_scenario() -> Result<KleinScenario> {
    let domain = klein_light_cone()?;
    let gens = GeneratorSet::new(vec![ProjectiveMap::diag(&[2.0, 1.0, 0.5])?])?;
    let x0 = v(&[1.0, 0.0, 1.0]);
    let ray = Geodesic::ray(&domain, &x0, &v(&[1.0, 0.0, 0.0]))?;
    Ok(KleinScenario {
        domain,
        gens,
        x0,
        ray,
        translation: 2f64.ln(),
    })
}

/// A reflection group with a proximal element `γ` moved to its eigenframe:
/// `γ` is diagonal, the attracting and repelling fixed points are `e₁`
/// and `e₃`, and the limit-set hull is enriched by `γ^{±j}` images of its
/// vertices so that it resolves both fixed points at all tested scales.
pub struct CoxeterAxis {
    pub hull: CoxeterHull,
    /// Reflection indices of `γ`.
    pub gamma_word: Vec<usize>,
    /// `γ` in the original coordinates.
    pub gamma: Mat,
    /// Eigenvector columns, by decreasing eigenvalue modulus.
    pub frame: Mat,
    pub eigenvalues: [f64; 3],
    /// `log |λ_i|`, decreasing.
    pub log_moduli: [f64; 3],
    /// The hull in eigenframe coordinates.
    pub domain: ConvexDomain,
    /// `[γ, σ₁, σ₂, σ₃]` in eigenframe coordinates, `γ` exactly diagonal.
    pub gens: GeneratorSet,
    pub x0: Vector,
    pub x_plus: Vector,
    pub x_minus: Vector,
}

/// Eigenvectors of a real matrix with real simple eigenvalues.
fn real_eigenframe(m: &Mat) -> Result<(Mat, Vec<f64>)> {
    let d = m.nrows();
    let eig = m.clone().complex_eigenvalues();
    if eig.iter().any(|z| z.im.abs() > 1e-10 * z.norm()) {
        return Err(Error::NotBiproximal);
    }
    let mut lams: Vec<f64> = eig.iter().map(|z| z.re).collect();
    lams.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut e = Mat::zeros(d, d);
    for (j, &l) in lams.iter().enumerate() {
        let a = m - Mat::identity(d, d) * l;
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let k = svd.singular_values.imin();
        e.set_column(j, &vt.row(k).transpose());
    }
    Ok((e, lams))
}

/// Scales `p` by `diag(λ)^j`, renormalizing by powers of two.
fn diag_power(p: &Vector, lams: &[f64], j: i32) -> Vector {
    let mut out = p.clone();
    for _ in 0..j.unsigned_abs() {
        for i in 0..out.len() {
            out[i] *= if j > 0 { lams[i] } else { 1.0 / lams[i] };
        }
        let e = crate::dd::exponent(out.amax());
        out *= crate::dd::pow2(-e);
    }
    out
}

/// Unit vectors this close to `e₁` or `e₃` count as axis points.
const AXIS_TOL: f64 = 1e-12;

/// Smallest distance of enrichment points to the axis points.
pub const RESOLUTION: f64 = 1e-9;

/// Default `γ` word for the (3,3,4) scenario.
pub const COXETER_GAMMA: [usize; 3] = [0, 1, 2];

pub fn coxeter_axis(depth: usize, enrichment: i32) -> Result<CoxeterAxis> {
    coxeter_axis_with((3, 3, 4), asymmetric_334(), &COXETER_GAMMA, depth, enrichment)
}

pub fn coxeter_axis_with(
    orders: (u32, u32, u32),
    offdiag: [f64; 6],
    gamma_word: &[usize],
    depth: usize,
    enrichment: i32,
) -> Result<CoxeterAxis> {
    let hull = build_coxeter_hull(orders, offdiag, depth)?;
    let gamma = gamma_word
        .iter()
        .fold(Mat::identity(3, 3), |acc, &i| acc * hull.generators[i].matrix());
    let (frame, lams) = real_eigenframe(&gamma)?;
    let mods: Vec<f64> = lams.iter().map(|l| l.abs()).collect();
    if !(mods[0] > mods[1] * (1.0 + 1e-8) && mods[1] > mods[2] * (1.0 + 1e-8)) {
        return Err(Error::NotBiproximal);
    }
    let finv = frame.clone().try_inverse().ok_or(Error::Singular)?;
    let to_frame = |p: &Vector| {
        let q = &finv * p;
        q.normalize()
    };
    let x0_std = hull
        .fixed_points
        .iter()
        .fold(Vector::zeros(3), |acc, (p, _)| acc + p.normalize());
    // Hull points at the fixed points of γ are replaced by exact axis
    // vectors: their rounding would be amplified by γ^{±j}.
    let mut pts: Vec<Vector> = hull
        .fixed_points
        .iter()
        .map(|(p, _)| to_frame(p))
        .filter(|p| p[0].abs().max(p[2].abs()) < 1.0 - AXIS_TOL)
        .collect();
    // Orient the fixed points of γ consistently with the cone.
    let (xp, _) = attracting_fixed_point(&gamma, &x0_std).ok_or(Error::NotBiproximal)?;
    let (xm, _) = attracting_fixed_point(&gamma.clone().try_inverse().ok_or(Error::Singular)?, &x0_std)
        .ok_or(Error::NotBiproximal)?;
    let (xp, xm) = (to_frame(&xp), to_frame(&xm));
    let x_plus = v(&[xp[0].signum(), 0.0, 0.0]);
    let x_minus = v(&[0.0, 0.0, xm[2].signum()]);
    pts.push(x_plus.clone());
    pts.push(x_minus.clone());
    let base = pts.clone();
    // Images closer than RESOLUTION to the axis points would collapse in
    // chart coordinates and corrupt the hull order.
    let far_from_axis = |p: &Vector| {
        let u = p.normalize();
        (&u - &x_plus).norm().min((&u - &x_minus).norm()) > RESOLUTION
    };
    for p in &base {
        for sign in [1, -1] {
            for j in 1..=enrichment {
                let q = diag_power(p, &lams, sign * j);
                if !far_from_axis(&q) {
                    break;
                }
                pts.push(q);
            }
        }
    }
    let units: Vec<Vector> = base.iter().map(|p| p.normalize()).collect();
    let phi = max_margin_covector(&units).ok_or(Error::NotProperlyConvex("fixed points not in a half-space".into()))?;
    if pts.iter().any(|p| !(phi.dot(p) > 0.0)) {
        return Err(Error::NotProperlyConvex("enriched points not in a half-space".into()));
    }
    let domain = ConvexDomain::hull_from_points(AffineChart::new(phi)?, &pts, true)?;
    let x0 = [1.0, -1.0]
        .iter()
        .map(|s| &x_plus + &x_minus * *s)
        .find(|p| domain.is_inside(p))
        .ok_or(Error::NotProperlyConvex("axis misses the hull".into()))?;
    let mut gens = vec![ProjectiveMap::diag(&lams)?];
    for g in &hull.generators {
        gens.push(ProjectiveMap::new(&finv * g.matrix() * &frame)?);
    }
    let log_moduli = [mods[0].ln(), mods[1].ln(), mods[2].ln()];
    Ok(CoxeterAxis {
        hull,
        gamma_word: gamma_word.to_vec(),
        gamma,
        frame,
        eigenvalues: [lams[0], lams[1], lams[2]],
        log_moduli,
        domain,
        gens: GeneratorSet::new(gens)?,
        x0,
        x_plus,
        x_minus,
    })
}

/// Generators `[a, b, γ]` of the rank-two diagonal group with a conjugated
/// biproximal `γ = q diag(8, 2, 1/2, 1/8) q⁻¹`, `q` a seeded random rotation.
pub struct WkScenario {
    pub gens: GeneratorSet,
    pub flat: FlatDirection,
    pub rotation: Mat,
}

pub fn wk_scenario(seed: u64) -> Result<WkScenario> {
    let a = ProjectiveMap::diag(&[2.0, 2.0, 0.5, 0.5])?;
    let b = ProjectiveMap::diag(&[2.0, 0.5, 2.0, 0.5])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(&mut rng, 4);
    let d = Mat::from_diagonal(&v(&[8.0, 2.0, 0.5, 0.125]));
    let gamma = ProjectiveMap::new(&q * d * q.transpose())?;
    let flat = flat_direction(&a, &b)?;
    Ok(WkScenario {
        gens: GeneratorSet::new(vec![a, b, gamma])?,
        flat,
        rotation: q,
    })
}
