//! Hull of the Klein disk and the dual point `ℓ*` of the horizontal
//! diameter `ℓ`, with the boost along `ℓ`.

use hglab_core::benzecri::line_angle;
use hglab_core::domains::build_disk_pole_hull;
use hglab_core::groups::{sequence_cartans, sv_distance_gap, GeneratorSet, GroupElement};
use hglab_core::hilbert::Geodesic;
use hglab_core::projlin::{ProjectiveMap, ProjectivePoint};
use hglab_core::regularity::{spectral_alpha_beta, strong_uniform_stats, uniform_regularity_stats};
use hglab_core::Result;

use super::common::{cartan_table, chart_direction, contraction_diameters, contraction_table, v, Ctx, RADII};
use super::klein::boost;
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["faces", "regularity", "contraction"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "faces" => faces(),
        "regularity" => regularity(ctx),
        "contraction" => contraction(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

/// Endpoints of `ℓ` close to a boundary segment endpoint.
const ENDPOINT_TOL: f64 = 1e-6;

fn faces() -> Result<DiagnosticOutput> {
    let dom = build_disk_pole_hull()?;
    let segments = dom.boundary_segments()?;
    let mut table = Table::new(&["point", "x", "y", "z", "in_segment_closure", "supports"]);
    let mut out = DiagnosticOutput::new("faces");
    for (name, p) in [("l_minus", v(&[-1.0, 0.0, 1.0])), ("l_plus", v(&[1.0, 0.0, 1.0]))] {
        let u = p.normalize();
        let hit = segments
            .iter()
            .any(|s| line_angle(s.a.coords(), &u).min(line_angle(s.b.coords(), &u)) < ENDPOINT_TOL);
        let supports = dom.supporting_hyperplanes(&ProjectivePoint::new(p.clone())?)?.len();
        table.push(vec![name.into(), num(p[0]), num(p[1]), num(p[2]), hit.to_string(), supports.to_string()]);
        out.check(&format!("{name}_in_segment_closure"), hit, format!("{} segments", segments.len()));
    }
    let star = ProjectivePoint::from_slice(&[0.0, 1.0, 0.0])?;
    let supports = dom.supporting_hyperplanes(&star)?.len();
    table.push(vec!["l_star".into(), "0".into(), "1".into(), "0".into(), String::new(), supports.to_string()]);
    out.set("segments", segments.len());
    out.set("l_star_supports", supports);
    out.check("l_star_two_supports", supports >= 2, format!("{supports} supports"));
    out.table = Some(table);
    Ok(out)
}

/// Powers of the unit boost along `ℓ`: strongly uniformly regular, with
/// `μ_{1,3}` tracking twice the displacement in the larger domain.
fn regularity(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_disk_pole_hull()?;
    let gs = GeneratorSet::new(vec![ProjectiveMap::new(boost(1.0, 0.0))?])?;
    let els: Vec<GroupElement> = (0..=ctx.n(30))
        .map(|k| GroupElement::from_word(&gs, vec![(0, k as i64)]))
        .collect();
    let mus = sequence_cartans(&gs, &els)?;
    let spec = spectral_alpha_beta(&mus)?;
    let u1 = uniform_regularity_stats(&mus, 1)?;
    let u2 = uniform_regularity_stats(&mus, 2)?;
    let s1 = strong_uniform_stats(&gs, &els, 1, 5)?;
    let s2 = strong_uniform_stats(&gs, &els, 2, 5)?;
    let gap = sv_distance_gap(&dom, &gs, &els, &v(&[0.0, 0.0, 1.0]))?;
    let exact = ctx.tol().exact.unwrap_or(1e-9);
    let mut out = DiagnosticOutput::new("regularity");
    out.set("spectral", &spec);
    out.set("uniform", [u1.ratio_min_tail, u2.ratio_min_tail]);
    out.set("strong_uniform", [s1.min_ratio, s2.min_ratio]);
    out.set("sv_gap", &gap);
    let half = |x: f64| (x - 0.5).abs() <= exact;
    out.check(
        "strongly_uniform_k1_k2",
        half(s1.min_ratio) && half(s2.min_ratio),
        format!("strong ratios {} {}", s1.min_ratio, s2.min_ratio),
    );
    out.check(
        "spectral_exact",
        (spec.alpha0 - 2.0).abs() <= exact && (spec.beta0 - 2.0).abs() <= exact,
        format!("alpha0 = {}, beta0 = {}", spec.alpha0, spec.beta0),
    );
    let mut table = cartan_table(&mus);
    table.header.push("sv_gap".into());
    for (row, g) in table.rows.iter_mut().zip(&gap.values) {
        row.push(num(*g));
    }
    out.table = Some(table);
    Ok(out)
}

/// Balls offset from `ℓ` towards `ℓ*`; reported without a check.
fn contraction(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_disk_pole_hull()?;
    let t = ctx.t_max(20.0);
    let geo = Geodesic::line(&v(&[-1.0, 0.0, 1.0]), &v(&[1.0, 0.0, 1.0]), &dom, 0.5)?.truncated(-t, t);
    let u = chart_direction(&dom, &v(&[0.0, 1.0, 0.0]));
    let diams = contraction_diameters(&dom, &geo, &u, &RADII)?;
    let mut out = DiagnosticOutput::new("contraction");
    out.set("radii", RADII);
    out.set("diameters", &diams);
    out.set("truncation", t);
    out.table = Some(contraction_table(&RADII, &diams));
    Ok(out)
}
