//! Built-in scenarios and their diagnostics.

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::report::DiagnosticOutput;

mod common;
mod counterexample;
mod coxeter;
mod example51;
mod graphp;
mod klein;
mod rescale;
mod simplex;

pub use common::Ctx;

/// A registry entry.
pub struct ScenarioSpec {
    pub id: &'static str,
    pub summary: &'static str,
    pub diagnostics: &'static [&'static str],
    run: fn(&Ctx, &str) -> hglab_core::Result<DiagnosticOutput>,
}

pub const REGISTRY: &[ScenarioSpec] = &[
    ScenarioSpec {
        id: "klein",
        summary: "Klein disk with a hyperbolic boost",
        diagnostics: klein::DIAGNOSTICS,
        run: klein::run,
    },
    ScenarioSpec {
        id: "simplex",
        summary: "standard 2-simplex with diagonal sequences",
        diagnostics: simplex::DIAGNOSTICS,
        run: simplex::run,
    },
    ScenarioSpec {
        id: "example51",
        summary: "hull of the Klein disk and the dual point of a diameter",
        diagnostics: example51::DIAGNOSTICS,
        run: example51::run,
    },
    ScenarioSpec {
        id: "coxeter334",
        summary: "asymmetric (3,3,4) reflection group hull along a proximal axis",
        diagnostics: coxeter::DIAGNOSTICS,
        run: coxeter::run,
    },
    ScenarioSpec {
        id: "graphp",
        summary: "graph domain with boundary |x|^p at the origin",
        diagnostics: graphp::DIAGNOSTICS,
        run: graphp::run,
    },
    ScenarioSpec {
        id: "counterexample",
        summary: "w_k sequence: uniformly but not strongly uniformly regular",
        diagnostics: counterexample::DIAGNOSTICS,
        run: counterexample::run,
    },
    ScenarioSpec {
        id: "rescale36",
        summary: "diag(n^2, 1/n, 1/n) rescaling towards the 2-simplex",
        diagnostics: rescale::DIAGNOSTICS,
        run: rescale::run,
    },
];

pub fn lookup(id: &str) -> Option<&'static ScenarioSpec> {
    REGISTRY.iter().find(|s| s.id == id)
}

/// Runs the selected diagnostics of one scenario, in config order.
pub fn run_scenario(cfg: &ScenarioConfig) -> CliResult<Vec<DiagnosticOutput>> {
    let spec = lookup(&cfg.id).ok_or_else(|| CliError::ConfigInvalid(format!("unknown scenario {:?}", cfg.id)))?;
    let ctx = Ctx::new(cfg);
    cfg.diagnostics
        .iter()
        .map(|d| {
            (spec.run)(&ctx, d).map_err(|source| CliError::ScenarioFailed {
                id: cfg.id.clone(),
                diagnostic: d.clone(),
                source,
            })
        })
        .collect()
}
