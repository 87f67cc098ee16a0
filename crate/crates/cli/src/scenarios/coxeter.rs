//! Asymmetric (3,3,4) reflection group: tracking along the axis of a
//! proximal element, singular value against displacement gaps, straightness
//! and exponents.

use hglab_core::domains::fit_conic;
use hglab_core::groups::{
    sequence_cartans, straightness_residual, sv_distance_gap_of, tracking_sequence, GeneratorSet, GroupElement,
    TrackingMode, TrackingOptions, TrackingSequence,
};
use hglab_core::hilbert::Geodesic;
use hglab_core::projlin::ProjectiveMap;
use hglab_core::regularity::{boundary_graph_fit, spectral_alpha_beta, tail_window, AdaptedChart, SupportChoice};
use hglab_core::scenarios::{coxeter_axis, CoxeterAxis};
use hglab_core::stats::trend_slope;
use hglab_core::Result;

use super::common::{cartan_table, Ctx};
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["hull", "sv_gap", "straightness", "regularity"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "hull" => hull(ctx),
        "sv_gap" => sv_gap(ctx),
        "straightness" => straightness(ctx),
        "regularity" => regularity(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

/// `γ^{±j}` images added to the hull around the axis points.
pub const ENRICHMENT: i32 = 40;
/// Hilbert time between tracked samples; `γ_n x₀` stays within the hull
/// resolution up to `n = 30`.
pub const TRACKING_STEP: f64 = 0.25;
/// Powers of `γ` used for the limit of the spectral ratio.
pub const GAMMA_POWERS: usize = 400;

pub fn axis(ctx: &Ctx) -> Result<CoxeterAxis> {
    coxeter_axis(ctx.depth(8), ENRICHMENT)
}

pub fn tracked(ctx: &Ctx) -> Result<(CoxeterAxis, TrackingSequence)> {
    let ax = axis(ctx)?;
    let ray = Geodesic::ray(&ax.domain, &ax.x0, &ax.x_plus)?;
    let opts = TrackingOptions {
        mode: TrackingMode::Incremental,
        step: TRACKING_STEP,
        ..Default::default()
    };
    let seq = tracking_sequence(&ax.domain, &ax.gens, &ray, &ax.x0, ctx.n(30), ctx.l_max(4), &opts)?;
    Ok((ax, seq))
}

/// `(ℓ₁ - ℓ₃)/(ℓ₁ - ℓ₂)` of the log eigenvalue moduli of `γ`.
pub fn alpha_theory(ax: &CoxeterAxis) -> f64 {
    let l = ax.log_moduli;
    (l[0] - l[2]) / (l[0] - l[1])
}

fn hull(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let ax = axis(ctx)?;
    let verts = ax.hull.domain.hull_chart_vertices().map(|v| v.to_vec()).unwrap_or_default();
    let (_, residual) = fit_conic(&verts);
    let mut table = Table::new(&["vertex", "u", "v"]);
    for (i, p) in verts.iter().enumerate() {
        table.push(vec![i.to_string(), num(p[0]), num(p[1])]);
    }
    let mut out = DiagnosticOutput::new("hull");
    out.set("vertices", verts.len());
    out.set("conic_residual", residual);
    out.set("eigenvalues", ax.eigenvalues);
    out.set("gamma_word", &ax.gamma_word);
    out.check("not_a_conic", residual > 1e-2, format!("best conic residual {residual:.3e}"));
    out.table = Some(table);
    Ok(out)
}

fn sv_gap(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (ax, seq) = tracked(ctx)?;
    let rep = sv_distance_gap_of(&ax.domain, &ax.gens, &seq)?;
    let mus = sequence_cartans(&ax.gens, &seq.elements)?;
    let mut table = Table::new(&["n", "word_length", "residual", "mu_1d", "gap"]);
    for (n, g) in rep.values.iter().enumerate() {
        table.push(vec![
            n.to_string(),
            ax.gens.word_length(&seq.elements[n].word).to_string(),
            num(seq.residuals[n]),
            num(mus[n].g(1, 3)),
            num(*g),
        ]);
    }
    let slope = trend_slope(&rep.values).unwrap_or(0.0);
    let tol = ctx.tol().trend.unwrap_or(1e-3);
    let mut out = DiagnosticOutput::new("sv_gap");
    out.set("max_abs", rep.max_abs);
    out.set("trend_slope", slope);
    out.set("achieved_r", seq.achieved_r);
    out.set("step", seq.step);
    out.check("bounded", rep.max_abs.is_finite(), format!("max |gap| = {:.4}", rep.max_abs));
    out.check("flat", slope <= tol, format!("trend slope {slope:.3e} <= {tol:.0e}"));
    out.table = Some(table);
    Ok(out)
}

fn straightness(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (ax, seq) = tracked(ctx)?;
    let rep = straightness_residual(&ax.gens, &seq.elements, 1)?;
    let n_max = seq.elements.len() - 1;
    let mut diag_max = vec![f64::NEG_INFINITY; n_max + 1];
    let mut table = Table::new(&["n", "m", "violation"]);
    for (n, row) in rep.table.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            let m = k + 1;
            table.push(vec![n.to_string(), m.to_string(), num(*x)]);
            diag_max[n + m] = diag_max[n + m].max(*x);
        }
    }
    let series: Vec<f64> = diag_max.into_iter().skip(1).collect();
    // The max over n + m = s ranges over s pairs, so the head rises with the pair count; judge the tail.
    let (lo, hi) = tail_window(series.len());
    let slope = trend_slope(&series[lo..=hi]).unwrap_or(0.0);
    let tol = ctx.tol().trend.unwrap_or(1e-3);
    let mut out = DiagnosticOutput::new("straightness");
    out.set("tail_window", (lo + 1, hi + 1));
    out.set("d_hat", rep.d_hat);
    out.set("witness", rep.witness);
    out.set("max_by_n_plus_m", &series);
    out.set("trend_slope", slope);
    out.check("finite", rep.d_hat.is_finite(), format!("D_hat = {:.4}", rep.d_hat));
    out.check("no_growth", slope <= tol, format!("tail trend of max over n+m: {slope:.3e} <= {tol:.0e}"));
    out.table = Some(table);
    Ok(out)
}

fn regularity(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let (ax, seq) = tracked(ctx)?;
    let theory = alpha_theory(&ax);
    let mus = sequence_cartans(&ax.gens, &seq.elements)?;
    let tracked_spec = spectral_alpha_beta(&mus)?;
    let gs = GeneratorSet::new(vec![ProjectiveMap::new(ax.gamma.clone())?])?;
    let els: Vec<GroupElement> = (0..=GAMMA_POWERS)
        .map(|n| GroupElement::from_word(&gs, vec![(0, n as i64)]))
        .collect();
    let powers_spec = spectral_alpha_beta(&sequence_cartans(&gs, &els)?)?;
    let geo = Geodesic::line(&ax.x_minus, &ax.x_plus, &ax.domain, 0.5)?;
    // Supports at the fixed points of γ: the eigen-covectors e₃* and e₁*.
    let support = SupportChoice::Explicit(vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]);
    let chart = AdaptedChart::new(&ax.domain, &geo, &support, 0.5, 1e-7)?;
    let fit = boundary_graph_fit(&chart)?;
    let stol = ctx.tol().spectral.unwrap_or(1e-3);
    let btol = ctx.tol().boundary.unwrap_or(0.1);
    let mut out = DiagnosticOutput::new("regularity");
    out.set("alpha_theory", theory);
    out.set("log_moduli", ax.log_moduli);
    out.set("spectral_tracking", &tracked_spec);
    out.set("spectral_powers", &powers_spec);
    out.set("boundary_fit", &fit);
    out.check(
        "spectral_powers",
        (powers_spec.alpha0 - theory).abs() <= stol,
        format!("alpha0 = {:.6} vs {:.6}", powers_spec.alpha0, theory),
    );
    out.check(
        "spectral_tracking",
        (tracked_spec.alpha0 - theory).abs() <= stol,
        format!("alpha0 = {:.6} vs {:.6}", tracked_spec.alpha0, theory),
    );
    out.check(
        "boundary_fit",
        (fit.alpha_hat - theory).abs() <= btol && (fit.beta_hat - theory).abs() <= btol,
        format!("alpha_hat = {:.4}, beta_hat = {:.4} vs {theory:.4} (tolerance {btol})", fit.alpha_hat, fit.beta_hat),
    );
    out.table = Some(cartan_table(&mus));
    Ok(out)
}
