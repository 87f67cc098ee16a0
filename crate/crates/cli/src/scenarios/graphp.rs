//! Graph domain `{|x|^p < y < 2 - |x|}`: boundary exponent at the origin.

use hglab_core::domains::build_graph_domain;
use hglab_core::hilbert::Geodesic;
use hglab_core::regularity::{boundary_graph_fit, AdaptedChart, SupportChoice};
use hglab_core::Result;

use super::common::{v, Ctx};
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["regularity"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "regularity" => regularity(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

/// Smallest radius of the fit; `f ~ r^p` must stay well above rounding.
pub const R_MIN: f64 = 1e-4;

/// Boundary fit along the vertical line from the top vertex to the origin.
fn regularity(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let p = ctx.p(3.0);
    let dom = build_graph_domain(p)?;
    let geo = Geodesic::line(&v(&[0.0, 2.0, 1.0]), &v(&[0.0, 0.0, 1.0]), &dom, 0.5)?;
    // The origin end has the unique support y = 0; the top end is a corner, so pick the horizontal support y = 2.
    let support = SupportChoice::Explicit(vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 2.0]);
    let chart = AdaptedChart::new(&dom, &geo, &support, 0.5, R_MIN)?;
    let fit = boundary_graph_fit(&chart)?;
    let tol = ctx.tol().boundary.unwrap_or(0.1);
    let mut table = Table::new(&["direction", "annulus", "slope"]);
    for (d, j, s) in &fit.slopes {
        table.push(vec![d.to_string(), j.to_string(), num(*s)]);
    }
    let mut out = DiagnosticOutput::new("regularity");
    out.set("p", p);
    out.set("boundary_fit", &fit);
    out.check(
        "exponent_p",
        (fit.alpha_hat - p).abs() <= tol && (fit.beta_hat - p).abs() <= tol,
        format!("alpha_hat = {:.4}, beta_hat = {:.4} vs p = {p}", fit.alpha_hat, fit.beta_hat),
    );
    out.table = Some(table);
    Ok(out)
}
