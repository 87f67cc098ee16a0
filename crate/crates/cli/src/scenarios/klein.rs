//! Klein disk: closed-form distances, the boost sequence and the
//! contraction profile of a diameter.

use hglab_core::domains::build_klein_ball;
use hglab_core::groups::{
    sequence_cartans, straightness_residual, sv_distance_gap_of, tracking_sequence, TrackingMode, TrackingOptions, TrackingSequence,
};
use hglab_core::hilbert::{hil, Geodesic};
use hglab_core::projlin::{Mat, Vector};
use hglab_core::regularity::{
    boundary_graph_fit, face_dimension_from_gaps, spectral_alpha_beta, strong_uniform_stats, uniform_regularity_stats,
    AdaptedChart, SupportChoice,
};
use hglab_core::scenarios::{klein_scenario, KleinScenario};
use hglab_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::common::{cartan_table, chart_direction, contraction_diameters, contraction_table, ulp_ratio, v, Ctx, RADII, ULPS};
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["hilbert", "sv_gap", "straightness", "regularity", "contraction"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "hilbert" => hilbert(ctx),
        "sv_gap" => sv_gap(ctx),
        "straightness" => straightness(ctx),
        "regularity" => regularity(ctx),
        "contraction" => contraction(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

/// Lorentz boost of rapidity `s` in the spatial direction `theta`.
pub fn boost(s: f64, theta: f64) -> Mat {
    let u = [theta.cos(), theta.sin()];
    let mut m = Mat::identity(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] += (s.cosh() - 1.0) * u[i] * u[j];
        }
        m[(i, 2)] = s.sinh() * u[i];
        m[(2, i)] = s.sinh() * u[i];
    }
    m[(2, 2)] = s.cosh();
    m
}

/// Pairs `(B o, B p)` with `p` at Euclidean radius `r` from the center `o`
/// and `B` a random boost; the distance is `½ log((1+r)/(1-r))`.
fn hilbert(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let dom = build_klein_ball(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut table = Table::new(&["pair", "r", "rapidity", "hil", "oracle", "abs_err"]);
    let mut worst: f64 = 0.0;
    for i in 0..ctx.samples(1000) {
        let r: f64 = rng.random_range(0.0..0.99);
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s: f64 = rng.random_range(0.0..3.0);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let b = boost(s, theta);
        let x = &b * v(&[0.0, 0.0, 1.0]);
        let y = &b * v(&[r * a.cos(), r * a.sin(), 1.0]);
        let d = hil(&dom, &x, &y)?;
        let oracle = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
        let err = (d - oracle).abs();
        worst = worst.max(err);
        table.push(vec![i.to_string(), num(r), num(s), num(d), num(oracle), num(err)]);
    }
    let tol = ctx.tol().exact.unwrap_or(1e-9);
    let mut out = DiagnosticOutput::new("hilbert");
    out.set("pairs", table.rows.len());
    out.set("max_abs_err", worst);
    out.check("closed_form", worst <= tol, format!("max error {worst:.3e} <= {tol:.1e}"));
    out.table = Some(table);
    Ok(out)
}

fn tracked(ctx: &Ctx) -> Result<(KleinScenario, TrackingSequence)> {
    let sc = klein_scenario()?;
    let opts = TrackingOptions {
        mode: TrackingMode::Incremental,
        step: sc.translation,
        ..Default::default()
    };
    let seq = tracking_sequence(&sc.domain, &sc.gens, &sc.ray, &sc.x0, ctx.n(30), ctx.l_max(4), &opts)?;
    Ok((sc, seq))
}

fn sv_gap(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (sc, seq) = tracked(ctx)?;
    let rep = sv_distance_gap_of(&sc.domain, &sc.gens, &seq)?;
    let mus = sequence_cartans(&sc.gens, &seq.elements)?;
    let mut table = Table::new(&["n", "word_length", "residual", "mu_1d", "gap"]);
    for (n, (e, g)) in seq.elements.iter().zip(&rep.values).enumerate() {
        table.push(vec![
            n.to_string(),
            sc.gens.word_length(&e.word).to_string(),
            num(seq.residuals[n]),
            num(mus[n].g(1, 3)),
            num(*g),
        ]);
    }
    let mut out = DiagnosticOutput::new("sv_gap");
    out.set("max_abs", rep.max_abs);
    let mu: Vec<f64> = mus.iter().map(|m| m.g(1, 3)).collect();
    let ulps = ulp_ratio(&rep.values, &mu);
    out.set("max_ulps", ulps);
    out.check(
        "exact_zero",
        ulps <= ULPS,
        format!("max |mu_1d - 2 hil| = {:e} ({ulps:.2} ulp of mu_1d)", rep.max_abs),
    );
    out.table = Some(table);
    Ok(out)
}

fn straightness(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (sc, seq) = tracked(ctx)?;
    let rep = straightness_residual(&sc.gens, &seq.elements, 1)?;
    let mut table = Table::new(&["n", "m", "violation"]);
    for (n, row) in rep.table.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            table.push(vec![n.to_string(), (k + 1).to_string(), num(*x)]);
        }
    }
    let tol = ctx.tol().exact.unwrap_or(1e-8);
    let mut out = DiagnosticOutput::new("straightness");
    out.set("d_hat", rep.d_hat);
    out.set("witness", rep.witness);
    out.check("d_hat_zero", rep.d_hat.abs() <= tol, format!("D_hat = {:.3e}", rep.d_hat));
    out.table = Some(table);
    Ok(out)
}

fn regularity(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (sc, seq) = tracked(ctx)?;
    let mus = sequence_cartans(&sc.gens, &seq.elements)?;
    let spec = spectral_alpha_beta(&mus)?;
    let u1 = uniform_regularity_stats(&mus, 1)?;
    let u2 = uniform_regularity_stats(&mus, 2)?;
    let strong = strong_uniform_stats(&sc.gens, &seq.elements, 1, 5)?;
    let face = face_dimension_from_gaps(&mus)?;
    let geo = Geodesic::line(&v(&[0.0, 0.0, 1.0]), &v(&[1.0, 0.0, 0.0]), &sc.domain, 0.5)?;
    let chart = AdaptedChart::new(&sc.domain, &geo, &SupportChoice::Unique, 0.5, 1e-7)?;
    let fit = boundary_graph_fit(&chart)?;
    let exact = ctx.tol().exact.unwrap_or(1e-9);
    let btol = ctx.tol().boundary.unwrap_or(0.05);
    let mut out = DiagnosticOutput::new("regularity");
    out.set("spectral", &spec);
    out.set("uniform_k1", u1.ratio_min_tail);
    out.set("uniform_k2", u2.ratio_min_tail);
    out.set("strong_uniform_k1", &strong);
    out.set("face_dimension", &face);
    out.set("boundary_fit", &fit);
    out.check(
        "spectral_exact",
        (spec.alpha0 - 2.0).abs() <= exact && (spec.beta0 - 2.0).abs() <= exact,
        format!("alpha0 = {}, beta0 = {}", spec.alpha0, spec.beta0),
    );
    out.check(
        "boundary_fit",
        (fit.alpha_hat - 2.0).abs() <= btol && (fit.beta_hat - 2.0).abs() <= btol,
        format!("alpha_hat = {:.6}, beta_hat = {:.6}, tolerance {btol}", fit.alpha_hat, fit.beta_hat),
    );
    out.check(
        "uniform_half",
        (u1.ratio_min_tail - 0.5).abs() <= exact && (strong.min_ratio - 0.5).abs() <= exact,
        format!("uniform {} strong {}", u1.ratio_min_tail, strong.min_ratio),
    );
    out.check("face_vertex", face.k == 0, format!("k = {}", face.k));
    out.table = Some(cartan_table(&mus));
    Ok(out)
}

/// Balls offset from the diameter `[e₃, e₁]` of the light-cone disk.
fn contraction(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let sc = klein_scenario()?;
    let t = ctx.t_max(20.0);
    let geo = Geodesic::line(&v(&[0.0, 0.0, 1.0]), &v(&[1.0, 0.0, 0.0]), &sc.domain, 0.5)?.truncated(-t, t);
    let u: Vector = chart_direction(&sc.domain, &v(&[0.0, 1.0, 0.0]));
    let diams = contraction_diameters(&sc.domain, &geo, &u, &RADII)?;
    let limit = ctx.tol().contraction.unwrap_or(1.5);
    let worst = diams.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let mut out = DiagnosticOutput::new("contraction");
    out.set("radii", RADII);
    out.set("diameters", &diams);
    out.set("truncation", t);
    out.check("bounded_under_doubling", worst < limit, format!("largest doubling ratio {worst:.4} < {limit}"));
    out.table = Some(contraction_table(&RADII, &diams));
    Ok(out)
}
