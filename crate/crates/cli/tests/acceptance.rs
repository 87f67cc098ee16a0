//! Acceptance suite: one PASS/FAIL line per criterion, with runtime budgets.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hglab::config::Config;
use hglab::report::DiagnosticOutput;
use hglab::scenarios::run_scenario;
use hglab_core::domains::{build_klein_ball, build_simplex};
use hglab_core::groups::{sequence_cartans, GeneratorSet, GroupElement};
use hglab_core::hilbert::hil;
use hglab_core::projlin::{cartan, cartan_of_product, exterior_power_norm_check, random_with_condition, Mat, ProjectiveMap, ProjectivePoint, Vector};
use hglab_core::regularity::face_dimension_from_gaps;
use hglab_core::scenarios::klein_light_cone;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

/// Runs built-in diagnostics through the scenario registry.
fn diagnostics(id: &str, seed: u64, diags: &[&str]) -> Vec<DiagnosticOutput> {
    let text = serde_json::json!({
        "output_dir": "unused",
        "scenarios": [{"id": id, "seed": seed, "diagnostics": diags}],
    })
    .to_string();
    let cfg = Config::parse(&text).expect("valid config");
    run_scenario(&cfg.scenarios[0]).unwrap_or_else(|e| panic!("{id}: {e}"))
}

/// All checks of the named diagnostics pass; failing checks are listed.
fn checks_pass(outs: &[DiagnosticOutput], names: &[&str]) -> (bool, String) {
    let mut failed = Vec::new();
    let mut details = Vec::new();
    for o in outs.iter().filter(|o| names.contains(&o.name.as_str())) {
        for c in &o.checks {
            if !c.passed {
                failed.push(format!("{}/{}: {}", o.name, c.name, c.detail));
            }
            details.push(format!("{}/{}", o.name, c.name));
        }
    }
    if failed.is_empty() {
        (true, format!("{} checks", details.len()))
    } else {
        (false, failed.join("; "))
    }
}

fn boost(s: f64, theta: f64) -> Mat {
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

fn c1_hilbert() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let disk = build_klein_ball(3).unwrap();
    let mut worst_disk: f64 = 0.0;
    for _ in 0..1000 {
        let r: f64 = rng.random_range(0.0..0.99);
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let b = boost(rng.random_range(0.0..3.0), rng.random_range(0.0..std::f64::consts::TAU));
        let (o, p) = (&b * v(&[0.0, 0.0, 1.0]), &b * v(&[r * a.cos(), r * a.sin(), 1.0]));
        let oracle = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
        worst_disk = worst_disk.max((hil(&disk, &o, &p).unwrap() - oracle).abs());
    }
    let simplex = build_simplex(2, 3).unwrap();
    let mut worst_simplex: f64 = 0.0;
    for _ in 0..1000 {
        let x = Vector::from_fn(3, |_, _| rng.random_range(-4.0f64..4.0).exp());
        let y = Vector::from_fn(3, |_, _| rng.random_range(-4.0f64..4.0).exp());
        let mut oracle: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                oracle = oracle.max(((x[i] * y[j]) / (x[j] * y[i])).ln());
            }
        }
        worst_simplex = worst_simplex.max((hil(&simplex, &x, &y).unwrap() - 0.5 * oracle).abs());
    }
    outcome(
        worst_disk <= 1e-9 && worst_simplex <= 1e-9,
        format!("disk max err {worst_disk:.2e}, simplex max err {worst_simplex:.2e}"),
    )
}

fn c2_cartan() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_exact: f64 = 0.0;
    for _ in 0..200 {
        let d = rng.random_range(2..=5);
        let entries: Vec<f64> = (0..d).map(|_| rng.random_range(-6.0f64..6.0).exp() * if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let mu = cartan(&ProjectiveMap::diag(&entries).unwrap()).unwrap();
        let mut logs: Vec<f64> = entries.iter().map(|x| x.abs().ln()).collect();
        logs.sort_by(|a, b| b.total_cmp(a));
        for i in 0..d - 1 {
            worst_exact = worst_exact.max((mu.g(i + 1, i + 2) - (logs[i] - logs[i + 1])).abs());
        }
        let a = Mat::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let s = &a + a.transpose();
        let mu = cartan(&ProjectiveMap::new(s.clone()).unwrap()).unwrap();
        let mut logs: Vec<f64> = s.symmetric_eigenvalues().iter().map(|x| x.abs().ln()).collect();
        logs.sort_by(|a, b| b.total_cmp(a));
        for i in 0..d - 1 {
            worst_exact = worst_exact.max((mu.g(i + 1, i + 2) - (logs[i] - logs[i + 1])).abs());
        }
    }
    let mut worst_ext: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.random_range(2..=5);
        let cond = 10f64.powf(rng.random_range(0.0..12.0));
        let g = ProjectiveMap::new(random_with_condition(&mut rng, d, cond)).unwrap();
        let mu = cartan(&g).unwrap();
        for k in 1..=d {
            let partial: f64 = mu.mu[..k].iter().sum();
            worst_ext = worst_ext.max((partial - exterior_power_norm_check(&g, k).unwrap()).abs());
        }
    }
    let factors = vec![ProjectiveMap::diag(&[2.0, 1.0, 0.5]).unwrap(); 60];
    let mu = cartan_of_product(&factors).unwrap();
    let product_err = (mu.g(1, 3) - 120.0 * 2f64.ln()).abs();
    outcome(
        worst_exact <= 1e-10 && worst_ext <= 1e-6 && product_err <= 1e-6,
        format!("exact {worst_exact:.2e}, exterior {worst_ext:.2e}, product {product_err:.2e}"),
    )
}

/// `|μ_{1,d}(γⁿ) - 2 hil(x₀, γⁿx₀)|` in units of rounding of `μ_{1,d}`.
fn gap_ulps(dom: &hglab_core::domains::ConvexDomain, m: &Mat, x0: &Vector, n: usize) -> f64 {
    let gs = GeneratorSet::new(vec![ProjectiveMap::new(m.clone()).unwrap()]).unwrap();
    let els: Vec<GroupElement> = (0..=n).map(|k| GroupElement::from_word(&gs, vec![(0, k as i64)])).collect();
    let mus = sequence_cartans(&gs, &els).unwrap();
    let mut worst: f64 = 0.0;
    for (k, mu) in mus.iter().enumerate() {
        let mut y = x0.clone();
        for _ in 0..k {
            y = m * &y;
            y /= y.amax();
        }
        let d = mu.dim();
        let gap = mu.g(1, d) - 2.0 * hil(dom, x0, &y).unwrap();
        worst = worst.max(gap.abs() / (f64::EPSILON * mu.g(1, d).max(1.0)));
    }
    worst
}

fn c3_sv_gap() -> Outcome {
    // Klein disk in the light-cone frame, where the boost is diagonal and its
    // fixed points are exact.
    let disk = klein_light_cone().unwrap();
    let klein = gap_ulps(&disk, &Mat::from_diagonal(&v(&[2.0, 1.0, 0.5])), &v(&[1.0, 0.0, 1.0]), 40);
    let simplex = build_simplex(2, 3).unwrap();
    let x0 = v(&[1.0, 1.0, 1.0]);
    let vertex = gap_ulps(&simplex, &Mat::from_diagonal(&v(&[2.0, 1.0, 0.5])), &x0, 40);
    let edge = gap_ulps(&simplex, &Mat::from_diagonal(&v(&[2.0, 2.0, 1.0])), &x0, 40);
    let outs = diagnostics("coxeter334", 4, &["sv_gap"]);
    let (cox, detail) = checks_pass(&outs, &["sv_gap"]);
    let exact = klein.max(vertex).max(edge) <= 4.0;
    outcome(
        exact && cox,
        format!("Klein {klein:.2} ulp, simplex {vertex:.2}/{edge:.2} ulp; Coxeter N = 30: {detail}"),
    )
}

fn c4_straightness() -> Outcome {
    let klein = diagnostics("klein", 1, &["straightness"]);
    let cox = diagnostics("coxeter334", 4, &["straightness"]);
    let (a, da) = checks_pass(&klein, &["straightness"]);
    let (b, db) = checks_pass(&cox, &["straightness"]);
    let d_hat = cox[0].report["d_hat"].as_f64().unwrap_or(f64::NAN);
    outcome(a && b, format!("Klein: {da}; Coxeter D_hat = {d_hat:.4}: {db}"))
}

fn c5_regularity() -> Outcome {
    let klein = diagnostics("klein", 1, &["regularity"]);
    let cox = diagnostics("coxeter334", 4, &["regularity"]);
    let (a, da) = checks_pass(&klein, &["regularity"]);
    let (b, db) = checks_pass(&cox, &["regularity"]);
    let theory = cox[0].report["alpha_theory"].as_f64().unwrap_or(f64::NAN);
    outcome(a && b, format!("Klein: {da}; Coxeter alpha = {theory:.6}: {db}"))
}

fn c6_faces() -> Outcome {
    let simplex = build_simplex(2, 3).unwrap();
    let mut ks = Vec::new();
    let mut limits = Vec::new();
    for (entries, limit) in [([2.0, 1.0, 0.5], [1.0, 0.0, 0.0]), ([2.0, 2.0, 1.0], [1.0, 1.0, 0.0])] {
        let gs = GeneratorSet::new(vec![ProjectiveMap::diag(&entries).unwrap()]).unwrap();
        let els: Vec<GroupElement> = (0..=60).map(|k| GroupElement::from_word(&gs, vec![(0, k as i64)])).collect();
        ks.push(face_dimension_from_gaps(&sequence_cartans(&gs, &els).unwrap()).unwrap().k);
        let z = ProjectivePoint::new(v(&limit)).unwrap();
        limits.push(simplex.face_of(&z).unwrap().dimension);
    }
    let outs = diagnostics("simplex", 2, &["faces"]);
    let (scen, detail) = checks_pass(&outs, &["faces"]);
    outcome(
        ks == [0, 1] && limits == [0, 1] && scen,
        format!("k from gaps {ks:?}, face_of {limits:?}; scenario: {detail}"),
    )
}

fn c7_wk() -> Outcome {
    let outs = diagnostics("counterexample", 7, &["wk"]);
    let (ok, detail) = checks_pass(&outs, &["wk"]);
    let r = &outs[0].report;
    let strong = r["strong_uniform_k1"]["min_ratio"].as_f64().unwrap_or(f64::NAN);
    let u1 = r["uniform_k1"]["ratio_min_tail"].as_f64().unwrap_or(f64::NAN);
    let u3 = r["uniform_k3"]["ratio_min_tail"].as_f64().unwrap_or(f64::NAN);
    let sup = r["sup_mu14_over_k2"].as_f64().unwrap_or(f64::NAN);
    let odd = r["odd_quotients"].as_array().map(|a| a.len()).unwrap_or(0);
    outcome(
        ok && strong == 0.0 && odd == 21 && u1 > 0.02 && u3 > 0.02,
        format!("strong min {strong}, odd k checked {odd}, tails k=1 {u1:.5} k=3 {u3:.5} over [20, 40], sup mu14/k^2 {sup:.4}; {detail}"),
    )
}

fn c8_contraction() -> Outcome {
    let klein = diagnostics("klein", 1, &["contraction"]);
    let simplex = diagnostics("simplex", 2, &["contraction"]);
    let (a, da) = checks_pass(&klein, &["contraction"]);
    let (b, db) = checks_pass(&simplex, &["contraction"]);
    outcome(a && b, format!("Klein: {da}; simplex: {db}"))
}

fn c9_rescale() -> Outcome {
    let outs = diagnostics("rescale36", 8, &["rescale"]);
    let (ok, detail) = checks_pass(&outs, &["rescale"]);
    outcome(ok, detail)
}

fn csv_files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn c10_determinism() -> Outcome {
    let full: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/full.json")).unwrap()).unwrap();
    let mut runs = Vec::new();
    let tmp = tempfile::tempdir().unwrap();
    for (i, parallel) in [false, true].into_iter().enumerate() {
        let out_dir = tmp.path().join(format!("run{i}"));
        let mut cfg = full.clone();
        cfg["output_dir"] = serde_json::Value::String(out_dir.to_string_lossy().into_owned());
        let cfg_path = tmp.path().join(format!("config{i}.json"));
        std::fs::write(&cfg_path, cfg.to_string()).unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_hglab"));
        cmd.arg("run").arg(&cfg_path);
        if parallel {
            cmd.arg("--parallel");
        }
        let status = cmd.output().unwrap().status;
        if !status.success() {
            return outcome(false, format!("run {i} exited with {status}"));
        }
        runs.push(csv_files(&out_dir));
    }
    let same = runs[0] == runs[1];
    outcome(same && !runs[0].is_empty(), format!("{} CSV files, sequential vs --parallel byte-identical: {same}", runs[0].len()))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 Hilbert metric oracles", c1_hilbert, Duration::from_secs(5)),
        ("2 Cartan oracles", c2_cartan, Duration::from_secs(10)),
        ("3 singular value gap identity", c3_sv_gap, Duration::from_secs(120)),
        ("4 straightness", c4_straightness, Duration::from_secs(120)),
        ("5 boundary regularity exponents", c5_regularity, Duration::from_secs(300)),
        ("6 face detection", c6_faces, Duration::from_secs(10)),
        ("7 w_k sequence", c7_wk, Duration::from_secs(120)),
        ("8 contraction dichotomy", c8_contraction, Duration::from_secs(120)),
        ("9 conical rescaling", c9_rescale, Duration::from_secs(300)),
        ("10 determinism", c10_determinism, Duration::from_secs(600)),
    ];
    let mut all = true;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let passed = o.passed && elapsed <= budget;
        all &= passed;
        println!(
            "criterion {name:<34} {}  [{:.2}s of {}s] {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
