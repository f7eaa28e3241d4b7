//! Subcommand drivers: resolve a config, open a run directory, write the
//! manifest, compute, emit artifacts, finalize the manifest.

use crate::figures::{
    self, CouplingRunConfig, HarnessError, HistogramFigureConfig, RatioFigureConfig,
    RecursionRunConfig,
};
use crate::manifest::{create_run_dir, RunManifest};
use crate::suites::{self, SuiteOptions, SuiteOutcome};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct CmdOutcome {
    pub run_dir: PathBuf,
    /// True when the command ran to completion but a verification failed;
    /// maps to exit code 1.
    pub verification_failed: bool,
}

pub fn cmd_histogram_figure(
    name: &str,
    cfg: &HistogramFigureConfig,
    out_base: &Path,
) -> Result<CmdOutcome, HarnessError> {
    cfg.validate()?;
    let run_dir = create_run_dir(out_base, name, cfg.seed)?;
    let mut manifest = RunManifest::begin(name, cfg, cfg.seed, &run_dir)?;
    let runs = figures::run_histogram_figure(cfg)?;
    figures::write_histogram_figure(&run_dir, cfg, &runs)?;
    manifest.finalize(&run_dir)?;
    Ok(CmdOutcome {
        run_dir,
        verification_failed: false,
    })
}

pub fn cmd_ratio_figure(
    cfg: &RatioFigureConfig,
    out_base: &Path,
) -> Result<CmdOutcome, HarnessError> {
    cfg.validate()?;
    let run_dir = create_run_dir(out_base, "fig3", cfg.seed)?;
    let mut manifest = RunManifest::begin("fig3", cfg, cfg.seed, &run_dir)?;
    let series = figures::run_ratio_figure(cfg)?;
    figures::write_ratio_figure(&run_dir, &series)?;
    manifest.finalize(&run_dir)?;
    Ok(CmdOutcome {
        run_dir,
        verification_failed: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suites: Vec<String>,
    pub options: SuiteOptions,
}

pub fn cmd_verify(cfg: &VerifyConfig, out_base: &Path) -> Result<CmdOutcome, HarnessError> {
    // validate names before any long run
    for name in &cfg.suites {
        if !suites::SUITE_NAMES.contains(&name.as_str()) {
            return Err(HarnessError::Config(format!(
                "unknown suite '{name}'; known suites: {}",
                suites::SUITE_NAMES.join(", ")
            )));
        }
    }
    let run_dir = create_run_dir(out_base, "verify", cfg.options.seed)?;
    let mut manifest = RunManifest::begin("verify", cfg, cfg.options.seed, &run_dir)?;
    let mut outcomes: Vec<SuiteOutcome> = Vec::new();
    for name in &cfg.suites {
        let outcome = suites::run_suite(name, &cfg.options)?;
        println!(
            "{:<20} {}",
            outcome.suite,
            if outcome.passed { "PASS" } else { "FAIL" }
        );
        outcomes.push(outcome);
    }
    fs::write(
        run_dir.join("verdicts.json"),
        serde_json::to_string_pretty(&outcomes).expect("verdicts serialize"),
    )?;
    let failed = outcomes.iter().any(|o| !o.passed);
    manifest.finalize(&run_dir)?;
    Ok(CmdOutcome {
        run_dir,
        verification_failed: failed,
    })
}

pub fn cmd_coupling(cfg: &CouplingRunConfig, out_base: &Path) -> Result<CmdOutcome, HarnessError> {
    cfg.validate()?;
    let run_dir = create_run_dir(out_base, "coupling", cfg.seed)?;
    let mut manifest = RunManifest::begin("coupling", cfg, cfg.seed, &run_dir)?;
    let reports = figures::run_coupling(cfg)?;
    figures::write_coupling(&run_dir, &reports)?;
    manifest.finalize(&run_dir)?;
    Ok(CmdOutcome {
        run_dir,
        verification_failed: false,
    })
}

pub fn cmd_recursion(
    cfg: &RecursionRunConfig,
    out_base: &Path,
) -> Result<CmdOutcome, HarnessError> {
    cfg.validate()?;
    let run_dir = create_run_dir(out_base, "recursion", cfg.seed)?;
    let mut manifest = RunManifest::begin("recursion", cfg, cfg.seed, &run_dir)?;
    let checks = figures::run_recursion(cfg)?;
    figures::write_recursion(&run_dir, &checks)?;
    manifest.finalize(&run_dir)?;
    let all_match = checks.iter().all(|c| c.all_match());
    Ok(CmdOutcome {
        run_dir,
        verification_failed: !all_match,
    })
}

/// Re-execute a finished run from its manifest, optionally overriding the
/// worker count. CSV outputs are byte-identical to the original run.
pub fn cmd_rerun(
    manifest_path: &Path,
    workers: Option<usize>,
    out_base: &Path,
) -> Result<CmdOutcome, HarnessError> {
    let manifest = RunManifest::load(manifest_path)?;
    match manifest.subcommand.as_str() {
        name @ ("fig1" | "fig2") => {
            let mut cfg: HistogramFigureConfig = manifest.config_as()?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            cmd_histogram_figure(name, &cfg, out_base)
        }
        "fig3" => {
            let mut cfg: RatioFigureConfig = manifest.config_as()?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            cmd_ratio_figure(&cfg, out_base)
        }
        "verify" => {
            let mut cfg: VerifyConfig = manifest.config_as()?;
            if workers.is_some() {
                cfg.options.workers = workers;
            }
            cmd_verify(&cfg, out_base)
        }
        "coupling" => {
            let cfg: CouplingRunConfig = manifest.config_as()?;
            cmd_coupling(&cfg, out_base)
        }
        "recursion" => {
            let cfg: RecursionRunConfig = manifest.config_as()?;
            cmd_recursion(&cfg, out_base)
        }
        other => Err(HarnessError::Config(format!(
            "manifest subcommand '{other}' is not rerunnable"
        ))),
    }
}
