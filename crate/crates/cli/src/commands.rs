//! The subcommands, as functions returning their printable output.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mzs_core::propagator::{transmitted_mass, SchemeKind};
use mzs_core::symlie::{export, Rules, SplittingScheme};
use mzs_core::verify::{run_checks, Check};
use serde_json::{json, Value};

use crate::config::{RunConfig, Sweep};
use crate::snapshot::Snapshot;
use crate::sweep::{self, SweepResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Pretty,
    Json,
    Latex,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pretty" => Ok(Format::Pretty),
            "json" => Ok(Format::Json),
            "latex" => Ok(Format::Latex),
            _ => Err(format!("unknown format {s:?} (expected pretty, json or latex)")),
        }
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn lanczos_json(cfg: &RunConfig) -> Value {
    json!({ "w2": cfg.lanczos.lanczos_w2, "w3": cfg.lanczos.lanczos_w3 })
}

/// Evolves the configured experiment and writes snapshots plus a summary.
pub fn run(cfg: &RunConfig) -> Result<Value> {
    fs::create_dir_all(&cfg.output.dir).with_context(|| format!("creating {}", cfg.output.dir.display()))?;
    let (_, report) = sweep::run(cfg)?;
    Snapshot::of(&report.state, cfg.epsilon, cfg.t_end).write(&cfg.snapshot_path())?;
    let mut files = Vec::new();
    for (k, (t, u)) in report.snapshots.iter().enumerate() {
        let name = format!("snapshot_{:05}.mzwf", k + 1);
        Snapshot::of(u, cfg.epsilon, *t).write(&cfg.output.dir.join(&name))?;
        files.push(name);
    }
    let summary = json!({
        "epsilon": cfg.epsilon,
        "T": cfg.t_end,
        "h": cfg.step(),
        "M": cfg.grid_size(),
        "steps": report.steps,
        "sigma": cfg.sigma,
        "scheme": cfg.scheme.name(),
        "potential": cfg.potential_source,
        "initial": { "gaussian": { "x0": cfg.initial.x0, "k0": cfg.initial.k0, "delta": cfg.initial.delta } },
        "lanczos": lanczos_json(cfg),
        "normDrift": report.max_norm_drift,
        "transmittedMass": transmitted_mass(&report.state),
        "seconds": report.seconds,
        "snapshot": cfg.output.snapshot,
        "snapshots": files,
    });
    write_json(&cfg.summary_path(), &summary)?;
    Ok(summary)
}

/// Converged reference solution for the configured run.
pub fn reference(cfg: &RunConfig) -> Result<Value> {
    fs::create_dir_all(&cfg.output.dir)?;
    let start = std::time::Instant::now();
    let sol = sweep::reference_for(cfg, cfg.step(), cfg.grid_size())?;
    let name = "reference.mzwf";
    Snapshot::of(&sol.state, cfg.epsilon, cfg.t_end).write(&cfg.output.dir.join(name))?;
    let summary = json!({
        "epsilon": cfg.epsilon,
        "T": cfg.t_end,
        "MR": sol.m_r,
        "hR": sol.h_r,
        "refinements": sol.refinements,
        "tailMass": sol.tail_mass,
        "change": if sol.change.is_finite() { json!(sol.change) } else { Value::Null },
        "extrapolate": cfg.reference.extrapolate,
        "seconds": start.elapsed().as_secs_f64(),
        "snapshot": name,
    });
    write_json(&cfg.output.dir.join("reference.json"), &summary)?;
    Ok(summary)
}

/// Sweeps and writes the CSV; returns it.
pub fn convergence(cfg: &RunConfig, sweep_spec: &Sweep, jobs: usize) -> Result<(String, SweepResult)> {
    let n = match sweep_spec {
        Sweep::Epsilon(l) | Sweep::Step(l) => l.len(),
    };
    if n < 3 {
        bail!("a convergence sweep needs at least 3 cases, got {n}");
    }
    fs::create_dir_all(&cfg.output.dir)?;
    let result = sweep::sweep(cfg, sweep_spec, &[cfg.scheme], jobs)?.remove(0);
    let csv = result.csv();
    fs::write(cfg.csv_path(), &csv).with_context(|| format!("writing {}", cfg.csv_path().display()))?;
    Ok((csv, result))
}

pub fn derived_scheme(order: u32) -> Result<SplittingScheme> {
    let rules = Rules::for_grade(order)?;
    let omega = rules.magnus()?;
    let stages = if order == 3 { 1 } else { 2 };
    Ok(rules.zassenhaus_split(&omega, stages)?)
}

pub fn derive(order: u32, format: Format) -> Result<String> {
    let scheme = derived_scheme(order)?;
    Ok(match format {
        Format::Pretty => export::pretty(&scheme),
        Format::Json => export::to_json(&scheme),
        Format::Latex => export::latex(&scheme),
    })
}

pub fn verify_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let pad = width - c.name.chars().count();
        s += &format!("{} {}{}  {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, " ".repeat(pad), c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    s += &format!("{} checks, {failed} failed\n", checks.len());
    s
}

pub fn verify() -> (String, bool) {
    let checks = run_checks(&Rules::default());
    (verify_table(&checks), checks.iter().all(|c| c.passed))
}

/// Applies a `--scheme` override.
pub fn with_scheme(mut cfg: RunConfig, scheme: Option<SchemeKind>) -> RunConfig {
    if let Some(s) = scheme {
        cfg.scheme = s;
    }
    cfg
}
