//! Rescaling of the cut disk `{xy + yz + zx > 0, x > 0}` by `diag(n², 1/n, 1/n)`.

use hglab_core::benzecri::{cut_disk_rescale, RescaleReport};
use hglab_core::Result;

use super::common::Ctx;
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["rescale"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "rescale" => rescale(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

pub const NS: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];
/// Largest relative change of the final distance under sample doubling.
pub const DOUBLING_TOL: f64 = 0.1;

fn push_rows(table: &mut Table, samples: usize, rep: &RescaleReport) {
    for row in &rep.rows {
        let mut r = vec![num(row.n), samples.to_string(), num(row.distance)];
        r.extend(row.probes.iter().flatten().map(|x| num(*x)));
        table.push(r);
    }
}

fn rescale(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let samples = ctx.samples(400);
    let coarse = cut_disk_rescale(&NS, samples)?;
    let fine = cut_disk_rescale(&NS, 2 * samples)?;
    let mut table = Table::new(&["n", "samples", "hausdorff_to_candidate", "m_1", "m_2", "m_3", "base_1", "base_2", "base_3"]);
    push_rows(&mut table, samples, &coarse);
    push_rows(&mut table, 2 * samples, &fine);
    let (dc, df) = (coarse.rows.last().unwrap().distance, fine.rows.last().unwrap().distance);
    let rel = if df == 0.0 { (dc - df).abs() } else { (dc - df).abs() / df };
    let base = &fine.rows.last().unwrap().probes[1];
    let to_e1 = (base[1].powi(2) + base[2].powi(2)).sqrt();
    let m = &fine.rows.last().unwrap().probes[0];
    let m_fixed = (m[1] - m[2]).abs() + m[0].abs();
    let limit = ctx.tol().rescale.unwrap_or(0.01);
    let mut out = DiagnosticOutput::new("rescale");
    out.set("coarse", &coarse);
    out.set("fine", &fine);
    out.set("relative_doubling_change", rel);
    let maps: Vec<serde_json::Value> = NS
        .iter()
        .map(|&n| serde_json::json!({"n": n, "g_n": [[n * n, 0.0, 0.0], [0.0, 1.0 / n, 0.0], [0.0, 0.0, 1.0 / n]]}))
        .collect();
    out.set("maps", maps);
    out.check("final_below_threshold", df < limit, format!("{df:.3e} < {limit}"));
    out.check("doubling_stable", rel <= DOUBLING_TOL, format!("relative change {rel:.3e}"));
    out.check("converged", fine.converged, "final < 0.1 x initial and < 0.01".into());
    out.check("probes", to_e1 < 1e-6 && m_fixed < 1e-12, format!("base to e1 {to_e1:.2e}, m drift {m_fixed:.2e}"));
    out.table = Some(table);
    Ok(out)
}
