//! The `w_k` sequence in the rank-two diagonal group with a conjugated
//! biproximal element: uniformly 1- and 3-regular, not strongly uniformly
//! 1-regular.

use hglab_core::groups::{sequence_cartans, word_cartan, wk_builder, GroupElement, Word};
use hglab_core::regularity::{strong_uniform_stats, uniform_regularity_stats_in};
use hglab_core::scenarios::wk_scenario;
use hglab_core::Result;

use super::common::Ctx;
use crate::report::{num, DiagnosticOutput, Table};

pub const DIAGNOSTICS: &[&str] = &["wk"];

pub fn run(ctx: &Ctx, diag: &str) -> Result<DiagnosticOutput> {
    match diag {
        "wk" => wk(ctx),
        _ => unreachable!("validated diagnostic"),
    }
}

/// Tail window of the uniform statistics.
pub const TAIL: (usize, usize) = (20, 40);
/// `N` of the strong uniform statistics.
pub const STRONG_N: usize = 5;

fn wk(ctx: &Ctx) -> Result<DiagnosticOutput> {
    let sc = wk_scenario(ctx.seed)?;
    let gs = &sc.gens;
    let k_max = ctx.n(41);
    let els: Vec<GroupElement> = (0..=k_max).map(|k| wk_builder(gs, &sc.flat, k)).collect::<Result<_>>()?;
    let mus = sequence_cartans(gs, &els)?;
    let window = (TAIL.0.min(k_max), TAIL.1.min(k_max));
    let u1 = uniform_regularity_stats_in(&mus, 1, window)?;
    let u3 = uniform_regularity_stats_in(&mus, 3, window)?;

    // Quotients w_{k-1}⁻¹ w_k at odd k: powers of the first generator.
    let mut odd = Vec::new();
    for k in (1..=k_max).step_by(2) {
        let q = gs.reduce(&gs.concat(&gs.inverse_word(&els[k - 1].word), &els[k].word));
        let c = word_cartan(gs, &q)?;
        odd.push((k, q, c.g(1, 2)));
    }
    let odd_ok = odd.iter().all(|(_, q, g)| is_a_power(q) && *g == 0.0);

    // Strong uniform statistics over the letter-level prefixes of w_K.
    let letters = gs.expand(&els[k_max].word);
    let mut prefixes = vec![GroupElement::identity(gs.dim())];
    let mut w: Word = Vec::new();
    for l in &letters {
        gs.push_letter(&mut w, *l);
        prefixes.push(GroupElement::from_word(gs, w.clone()));
    }
    let strong = strong_uniform_stats(gs, &prefixes, 1, STRONG_N)?;
    let (sn, sm) = strong.witness;
    let witness_word = gs.reduce(&gs.concat(&gs.inverse_word(&prefixes[sn].word), &prefixes[sn + sm].word));

    // Subadditivity: μ_{1,4}(w_k) is at most the sum over its letters.
    let letter_mu: Vec<f64> = (0..gs.len())
        .map(|i| word_cartan(gs, &vec![(i, 1)]).map(|c| c.g(1, 4)))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "k", "word_letters", "mu_12", "mu_23", "mu_34", "mu_14", "ratio_k1", "ratio_k3", "mu_14_over_k2", "letter_bound",
    ]);
    let mut sup_ratio: f64 = 0.0;
    let mut bound_ok = true;
    for (k, (e, m)) in els.iter().zip(&mus).enumerate() {
        let bound: f64 = gs.expand(&e.word).iter().map(|(i, _)| letter_mu[*i]).sum();
        bound_ok &= m.g(1, 4) <= bound + 1e-9;
        let q = if k == 0 { f64::NAN } else { m.g(1, 4) / (k * k) as f64 };
        if k > 0 {
            sup_ratio = sup_ratio.max(q);
        }
        table.push(vec![
            k.to_string(),
            gs.expand(&e.word).len().to_string(),
            num(m.g(1, 2)),
            num(m.g(2, 3)),
            num(m.g(3, 4)),
            num(m.g(1, 4)),
            num(m.g(1, 2) / m.g(1, 4)),
            num(m.g(3, 4) / m.g(1, 4)),
            if k == 0 { String::new() } else { num(q) },
            num(bound),
        ]);
    }
    let utol = ctx.tol().uniform.unwrap_or(0.02);
    let mut out = DiagnosticOutput::new("wk");
    out.set("uniform_k1", &u1);
    out.set("uniform_k3", &u3);
    out.set("strong_uniform_k1", &strong);
    out.set("strong_witness_quotient", &witness_word);
    out.set("prefix_count", prefixes.len());
    out.set(
        "odd_quotients",
        odd.iter().map(|(k, q, g)| serde_json::json!({"k": k, "quotient": q, "mu_12": g})).collect::<Vec<_>>(),
    );
    out.set("sup_mu14_over_k2", sup_ratio);
    out.check(
        "not_strongly_uniform",
        strong.min_ratio == 0.0 && is_a_power(&witness_word),
        format!("min ratio {} at {:?}, quotient {:?}", strong.min_ratio, strong.witness, witness_word),
    );
    out.check("odd_quotients_are_a_powers", odd_ok, format!("{} odd k checked", odd.len()));
    out.check(
        "uniform_tails",
        u1.ratio_min_tail > utol && u3.ratio_min_tail > utol && u1.divergent && u3.divergent,
        format!("k=1 {:.5}, k=3 {:.5} over {:?}", u1.ratio_min_tail, u3.ratio_min_tail, window),
    );
    out.check(
        "mu14_quadratic_bound",
        bound_ok && sup_ratio.is_finite(),
        format!("sup mu_14/k^2 = {sup_ratio:.4}"),
    );
    out.table = Some(table);
    Ok(out)
}

/// A nonzero power of the first generator `a`.
fn is_a_power(w: &Word) -> bool {
    w.len() == 1 && w[0].0 == 0 && w[0].1 != 0
}
