//! The `dist` and `cartan` subcommands.

use std::fs;
use std::path::Path;

use hglab_core::domains::{ConvexDomain, DomainSpec};
use hglab_core::hilbert::hil;
use hglab_core::projlin::{cartan_of_product, Mat, ProjectiveMap, Vector};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{io_err, CliError, CliResult};

/// Parses `a,b,c` into a vector.
pub fn parse_point(s: &str) -> CliResult<Vector> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::BadInput(format!("point {s:?}: {e}")))?;
    Ok(Vector::from_vec(xs))
}

/// Hilbert distance between two points of a serialized domain.
pub fn dist(domain_path: &Path, x: &str, y: &str) -> CliResult<f64> {
    let text = fs::read_to_string(domain_path).map_err(io_err(domain_path))?;
    let spec: DomainSpec = serde_json::from_str(&text)?;
    let dom = ConvexDomain::from_spec(&spec)?;
    let (x, y) = (parse_point(x)?, parse_point(y)?);
    if x.len() != dom.dim() || y.len() != dom.dim() {
        return Err(CliError::BadInput(format!("points must have {} coordinates", dom.dim())));
    }
    Ok(hil(&dom, &x, &y)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CartanInput {
    Matrix(Vec<Vec<f64>>),
    Product {
        #[serde(rename = "product")]
        factors: Vec<Vec<Vec<f64>>>,
    },
}

fn to_map(rows: &[Vec<f64>]) -> CliResult<ProjectiveMap> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::BadInput("matrix must be square and nonempty".into()));
    }
    Ok(ProjectiveMap::new(Mat::from_fn(d, d, |i, j| rows[i][j]))?)
}

/// Cartan projection of a matrix (`[[…], …]`) or of a product
/// (`{"product": [m₁, m₂, …]}`, applied as `m₁ m₂ …`).
pub fn cartan(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let input: CartanInput = serde_json::from_str(&text)?;
    let factors = match input {
        CartanInput::Matrix(m) => vec![to_map(&m)?],
        CartanInput::Product { factors } => factors.iter().map(|m| to_map(m)).collect::<CliResult<_>>()?,
    };
    let c = cartan_of_product(&factors)?;
    let d = c.dim();
    let gaps: Vec<f64> = (1..d).map(|i| c.g(i, i + 1)).collect();
    Ok(json!({ "mu": c.mu, "gaps": gaps, "mu_1d": c.g(1, d) }))
}
