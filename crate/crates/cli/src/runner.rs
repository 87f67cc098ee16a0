//! Executes a config: runs scenarios, writes CSV and JSON outputs and the
//! manifest, and reports assertion violations.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Config, ScenarioConfig};
use crate::error::{io_err, CliError, CliResult};
use crate::report::{Check, DiagnosticOutput, Table};
use crate::scenarios;

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub scenario: String,
    pub diagnostic: String,
    pub csv: Option<String>,
    pub json: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    /// SHA-256 of the config file bytes.
    pub config_hash: String,
    pub assert_mode: bool,
    pub outputs: Vec<OutputEntry>,
    pub wall_clock_seconds: f64,
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    /// Failed checks as `(scenario, diagnostic, check)`.
    pub failures: Vec<(String, String, Check)>,
}

#[derive(Serialize)]
struct DiagnosticFile<'a> {
    scenario: &'a str,
    id: &'a str,
    seed: u64,
    diagnostic: &'a str,
    report: &'a serde_json::Value,
    checks: &'a [Check],
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_csv(path: &Path, table: &Table) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_outputs(dir: &Path, cfg: &ScenarioConfig, outs: &[DiagnosticOutput]) -> CliResult<Vec<OutputEntry>> {
    let sub = dir.join(cfg.output_name());
    fs::create_dir_all(&sub).map_err(io_err(&sub))?;
    let mut entries = Vec::new();
    for o in outs {
        let csv = match &o.table {
            Some(t) => {
                let p = sub.join(format!("{}.csv", o.name));
                write_csv(&p, t)?;
                Some(p.display().to_string())
            }
            None => None,
        };
        let p = sub.join(format!("{}.json", o.name));
        let file = DiagnosticFile {
            scenario: cfg.output_name(),
            id: &cfg.id,
            seed: cfg.seed,
            diagnostic: &o.name,
            report: &o.report,
            checks: &o.checks,
        };
        fs::write(&p, serde_json::to_string_pretty(&file)? + "\n").map_err(io_err(&p))?;
        entries.push(OutputEntry {
            scenario: cfg.output_name().to_string(),
            diagnostic: o.name.clone(),
            csv,
            json: p.display().to_string(),
            passed: o.passed(),
        });
    }
    Ok(entries)
}

/// Runs every scenario of a config file.
pub fn run(config_path: &Path, parallel: bool, assert_mode: bool) -> CliResult<RunOutcome> {
    let bytes = fs::read(config_path).map_err(io_err(config_path))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    let cfg = Config::parse(&text)?;
    run_config(&cfg, &config_hash(&bytes), parallel, assert_mode)
}

pub fn run_config(cfg: &Config, hash: &str, parallel: bool, assert_mode: bool) -> CliResult<RunOutcome> {
    let start = Instant::now();
    let dir = PathBuf::from(&cfg.output_dir);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let results: Vec<CliResult<Vec<DiagnosticOutput>>> = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = cfg
                .scenarios
                .iter()
                .map(|sc| s.spawn(move || scenarios::run_scenario(sc)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
        })
    } else {
        cfg.scenarios.iter().map(scenarios::run_scenario).collect()
    };
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    for (sc, res) in cfg.scenarios.iter().zip(results) {
        let outs = res?;
        for o in &outs {
            for c in o.checks.iter().filter(|c| !c.passed) {
                failures.push((sc.output_name().to_string(), o.name.clone(), c.clone()));
            }
        }
        outputs.extend(write_outputs(&dir, sc, &outs)?);
        print_summary(sc, &outs);
    }
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hash.to_string(),
        assert_mode,
        outputs,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(io_err(&manifest_path))?;
    Ok(RunOutcome {
        manifest,
        manifest_path,
        failures,
    })
}

fn print_summary(sc: &ScenarioConfig, outs: &[DiagnosticOutput]) {
    for o in outs {
        if o.checks.is_empty() {
            println!("{:<16} {:<14} {:<30} report", sc.output_name(), o.name, "-");
        }
        for c in &o.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            println!("{:<16} {:<14} {:<30} {tag}  {}", sc.output_name(), o.name, c.name, c.detail);
        }
    }
}
