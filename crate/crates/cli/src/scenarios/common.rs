use hglab_core::domains::ConvexDomain;
use hglab_core::hilbert::{contraction_profile, offset_center, BallSampler, Geodesic, BALL_MARGIN};
use hglab_core::projlin::{CartanVector, Vector};
use hglab_core::Result;

use crate::config::{Horizons, Params, ScenarioConfig, Tolerances};
use crate::report::{num, Table};

/// Scenario settings with defaults resolved per call site.
pub struct Ctx {
    pub seed: u64,
    horizons: Horizons,
    tolerances: Tolerances,
    params: Params,
}

impl Ctx {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            seed: cfg.seed,
            horizons: cfg.horizons,
            tolerances: cfg.tolerances,
            params: cfg.params,
        }
    }

    pub fn n(&self, default: usize) -> usize {
        self.horizons.n.unwrap_or(default)
    }

    pub fn l_max(&self, default: usize) -> usize {
        self.horizons.l_max.unwrap_or(default)
    }

    pub fn t_max(&self, default: f64) -> f64 {
        self.horizons.t_max.unwrap_or(default)
    }

    pub fn samples(&self, default: usize) -> usize {
        self.params.samples.unwrap_or(default)
    }

    pub fn p(&self, default: f64) -> f64 {
        self.params.p.unwrap_or(default)
    }

    pub fn depth(&self, default: usize) -> usize {
        self.params.depth.unwrap_or(default)
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tolerances
    }
}

pub fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

/// Radii of the contraction profiles.
pub const RADII: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Largest nearest-point projection diameter of a ball of radius `r` whose
/// center sits at distance `r + 2·BALL_MARGIN` from `geo(0)` along `u`.
pub fn contraction_diameters(dom: &ConvexDomain, geo: &Geodesic, u: &Vector, radii: &[f64]) -> Result<Vec<f64>> {
    radii
        .iter()
        .map(|&r| {
            let c = offset_center(dom, geo, 0.0, u, r + 2.0 * BALL_MARGIN)?;
            let rep = contraction_profile(dom, geo, &BallSampler::Explicit(vec![(c.iter().copied().collect(), r)]))?;
            Ok(rep.max_projection_diameter)
        })
        .collect()
}

pub fn contraction_table(radii: &[f64], diams: &[f64]) -> Table {
    let mut t = Table::new(&["radius", "max_projection_diameter", "ratio_to_previous"]);
    for (i, (r, d)) in radii.iter().zip(diams).enumerate() {
        let ratio = if i == 0 { String::new() } else { num(d / diams[i - 1]) };
        t.push(vec![num(*r), num(*d), ratio]);
    }
    t
}

/// Projection of `x` to the kernel of the chart covector of `dom`.
pub fn chart_direction(dom: &ConvexDomain, x: &Vector) -> Vector {
    let phi = dom.chart().phi();
    let w = dom.witness();
    x - w * (phi.dot(x) / phi.dot(w))
}

/// Cartan vectors as rows `n, μ_1, …, μ_d`.
pub fn cartan_table(mus: &[CartanVector]) -> Table {
    let d = mus.first().map(|m| m.dim()).unwrap_or(0);
    let mut header: Vec<String> = vec!["n".into()];
    header.extend((1..=d).map(|i| format!("mu_{i}")));
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for (n, m) in mus.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.extend(m.mu.iter().map(|x| num(*x)));
        t.push(row);
    }
    t
}

/// Rounding allowance, in units of `ε·max(1, μ_{1,d})`, for identities that
/// hold exactly in real arithmetic.
pub const ULPS: f64 = 4.0;

/// Largest `|gap_n| / (ε·max(1, μ_n))`.
pub fn ulp_ratio(gaps: &[f64], mu: &[f64]) -> f64 {
    gaps.iter()
        .zip(mu)
        .map(|(g, m)| g.abs() / (f64::EPSILON * m.abs().max(1.0)))
        .fold(0.0, f64::max)
}
