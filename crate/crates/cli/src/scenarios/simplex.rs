//! Standard 2-simplex: closed-form distances, diagonal sequences towards a
//! vertex and an edge, and the contraction profile of an edge-asymptotic line.

use hglab_core::domains::{build_simplex, ConvexDomain};
use hglab_core::groups::{sequence_cartans, sv_distance_gap, GeneratorSet, GroupElement};
use hglab_core::hilbert::{hil, Geodesic};
use hglab_core::projlin::{CartanVector, ProjectiveMap, ProjectivePoint, Vector};
use hglab_core::regularity::{face_dimension_from_gaps, spectral_alpha_beta, uniform_regularity_stats};
use hglab_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::common::{cartan_table, contraction_diameters, contraction_table, ulp_ratio, v, Ctx, RADII, ULPS};
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["hilbert", "sv_gap", "faces", "regularity", "contraction"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "hilbert" => hilbert(ctx),
        "sv_gap" => sv_gap(ctx),
        "faces" => faces(ctx),
        "regularity" => regularity(ctx),
        "contraction" => contraction(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

/// The diagonal sequences: towards the vertex `[1:0:0]` and the edge point `[1:1:0]`.
pub const SEQUENCES: [(&str, [f64; 3]); 2] = [("vertex", [2.0, 1.0, 0.5]), ("edge", [2.0, 2.0, 1.0])];

fn oracle(x: &Vector, y: &Vector) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            best = best.max(((x[i] * y[j]) / (x[j] * y[i])).ln());
        }
    }
    0.5 * best
}

fn hilbert(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_simplex(2, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let point = |rng: &mut ChaCha8Rng| Vector::from_fn(3, |_, _| rng.random_range(-5.0f64..5.0).exp());
    let mut table = Table::new(&["pair", "x1", "x2", "x3", "y1", "y2", "y3", "hil", "oracle", "abs_err"]);
    let mut worst: f64 = 0.0;
    for i in 0..ctx.samples(1000) {
        let (x, y) = (point(&mut rng), point(&mut rng));
        let d = hil(&dom, &x, &y)?;
        let o = oracle(&x, &y);
        let err = (d - o).abs();
        worst = worst.max(err);
        let mut row = vec![i.to_string()];
        row.extend(x.iter().chain(y.iter()).map(|c| num(*c)));
        row.extend([num(d), num(o), num(err)]);
        table.push(row);
    }
    let tol = ctx.tol().exact.unwrap_or(1e-9);
    let mut out = DiagnosticOutput::new("hilbert");
    out.set("pairs", table.rows.len());
    out.set("max_abs_err", worst);
    out.check("closed_form", worst <= tol, format!("max error {worst:.3e} <= {tol:.1e}"));
    out.table = Some(table);
    Ok(out)
}

/// `γⁿ` for `n = 0..=N` with `γ = diag(entries)`.
pub fn powers(entries: &[f64], n: usize) -> Result<(GeneratorSet, Vec<GroupElement>)> {
    let gs = GeneratorSet::new(vec![ProjectiveMap::diag(entries)?])?;
    let els = (0..=n).map(|k| GroupElement::from_word(&gs, vec![(0, k as i64)])).collect();
    Ok((gs, els))
}

fn sv_gap(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_simplex(2, 3)?;
    let x0 = v(&[1.0, 1.0, 1.0]);
    let mut table = Table::new(&["sequence", "n", "mu_1d", "gap"]);
    let mut out = DiagnosticOutput::new("sv_gap");
    for (name, entries) in SEQUENCES {
        let (gs, els) = powers(&entries, ctx.n(30))?;
        let rep = sv_distance_gap(&dom, &gs, &els, &x0)?;
        let mus = sequence_cartans(&gs, &els)?;
        for (n, g) in rep.values.iter().enumerate() {
            table.push(vec![name.to_string(), n.to_string(), num(mus[n].g(1, 3)), num(*g)]);
        }
        out.set(&format!("{name}_max_abs"), rep.max_abs);
        let mu: Vec<f64> = mus.iter().map(|m| m.g(1, 3)).collect();
        let ulps = ulp_ratio(&rep.values, &mu);
        out.check(
            &format!("{name}_exact_zero"),
            ulps <= ULPS,
            format!("max |mu_1d - 2 hil| = {:e} ({ulps:.2} ulp of mu_1d)", rep.max_abs),
        );
    }
    out.table = Some(table);
    Ok(out)
}

/// Limit of `γⁿ x₀` for diagonal `γ`: the coordinates of largest modulus.
fn diagonal_limit(entries: &[f64], x0: &Vector) -> Vector {
    let top = entries.iter().map(|e| e.abs()).fold(0.0, f64::max);
    Vector::from_fn(x0.len(), |i, _| if entries[i].abs() == top { x0[i] } else { 0.0 })
}

/// Sequence name, `k` from the gaps, face dimension at the limit and the Cartan vectors.
pub type FacePair = (&'static str, usize, usize, Vec<CartanVector>);

/// Face dimension from the gap pattern and from the exact face at the limit.
pub fn face_pairs(dom: &ConvexDomain, n: usize) -> Result<Vec<FacePair>> {
    let x0 = v(&[1.0, 1.0, 1.0]);
    SEQUENCES
        .iter()
        .map(|(name, entries)| {
            let (gs, els) = powers(entries, n)?;
            let mus = sequence_cartans(&gs, &els)?;
            let k = face_dimension_from_gaps(&mus)?.k;
            let limit = ProjectivePoint::new(diagonal_limit(entries, &x0))?;
            let face = dom.face_of(&limit)?.dimension;
            Ok((*name, k, face, mus))
        })
        .collect()
}

fn faces(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_simplex(2, 3)?;
    let mut table = Table::new(&["sequence", "k_from_gaps", "face_dimension"]);
    let mut out = DiagnosticOutput::new("faces");
    for (name, k, face, _) in face_pairs(&dom, ctx.n(30))? {
        table.push(vec![name.to_string(), k.to_string(), face.to_string()]);
        out.set(name, serde_json::json!({ "k": k, "face_dimension": face }));
        out.check(&format!("{name}_matches_face"), k == face, format!("k = {k}, face_of = {face}"));
    }
    let expected = [0usize, 1];
    let got: Vec<usize> = table.rows.iter().map(|r| r[1].parse().unwrap_or(usize::MAX)).collect();
    out.check("expected_dimensions", got == expected, format!("{got:?}"));
    out.table = Some(table);
    Ok(out)
}

/// Spectral exponents of the vertex sequence. The limit vertex is not C¹,
/// so no boundary comparison is made.
fn regularity(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (gs, els) = powers(&SEQUENCES[0].1, ctx.n(30))?;
    let mus = sequence_cartans(&gs, &els)?;
    let spec = spectral_alpha_beta(&mus)?;
    let (egs, eels) = powers(&SEQUENCES[1].1, ctx.n(30))?;
    let edge = uniform_regularity_stats(&sequence_cartans(&egs, &eels)?, 1)?;
    let exact = ctx.tol().exact.unwrap_or(1e-9);
    let mut out = DiagnosticOutput::new("regularity");
    out.set("spectral", &spec);
    out.set("boundary_fit", "not applicable: the limit vertex is not C1");
    out.set("edge_uniform_k1", edge.ratio_min_tail);
    out.check(
        "spectral_exact",
        (spec.alpha0 - 2.0).abs() <= exact && (spec.beta0 - 2.0).abs() <= exact,
        format!("alpha0 = {}, beta0 = {}", spec.alpha0, spec.beta0),
    );
    out.check(
        "edge_not_uniform",
        edge.ratio_min_tail == 0.0,
        format!("edge k=1 ratio {}", edge.ratio_min_tail),
    );
    out.table = Some(cartan_table(&mus));
    Ok(out)
}

/// The line from `[1:1:0]` to `[0:1:1]`, both in open edges.
fn contraction(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_simplex(2, 3)?;
    let t = ctx.t_max(20.0);
    let geo = Geodesic::line(&v(&[1.0, 1.0, 0.0]), &v(&[0.0, 1.0, 1.0]), &dom, 0.5)?.truncated(-t, t);
    let c0 = dom.lift(&geo.point_vec(0.0)).ok_or(hglab_core::Error::NotInterior)?;
    let u = dom.lift(&v(&[1.0, 0.0, 1.0])).ok_or(hglab_core::Error::NotInterior)? - &c0;
    let diams = contraction_diameters(&dom, &geo, &u, &RADII)?;
    let monotone = diams.windows(2).all(|w| w[1] > w[0]);
    let mut out = DiagnosticOutput::new("contraction");
    out.set("radii", RADII);
    out.set("diameters", &diams);
    out.set("truncation", t);
    out.check("monotone_growth", monotone, format!("diameters {diams:?}"));
    out.table = Some(contraction_table(&RADII, &diams));
    Ok(out)
}
