//! Figure and diagnostic runners behind the CLI subcommands.
//!
//! Histogram figures sweep tail exponents for one algorithm on the two-armed
//! unit-variance Gaussian bandit; the exponent e maps to the design variance
//! sigma^2 = |e| * sigma_0^2 with sigma_0^2 read from the environment. Ratio
//! figures track observed/CLT-predicted regret moments over a horizon grid.

use bandit_core::{run_trajectory, Algorithm, BanditEnv, PolicyConfig, SeedSpec, SimOptions};
use limit_theory::{
    clt_params, design_variance_for_exponent, sandwich_check, verify_ucb_recursion, CouplingReport,
    UcbRecursionCheck,
};
use montecarlo::{
    ratio_curve, run_campaign, write_campaign_outputs, CampaignConfig, CampaignResult, RatioCurve,
    Series,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::svg;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Campaign(#[from] montecarlo::CampaignError),
    #[error(transparent)]
    Ratio(#[from] montecarlo::RatioError),
    #[error(transparent)]
    Predict(#[from] limit_theory::PredictError),
    #[error(transparent)]
    Sim(#[from] bandit_core::SimError),
    #[error(transparent)]
    Coupling(#[from] limit_theory::CouplingError),
    #[error(transparent)]
    Recursion(#[from] limit_theory::RecursionError),
    #[error(transparent)]
    Env(#[from] bandit_core::EnvError),
    #[error(transparent)]
    Policy(#[from] bandit_core::PolicyError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl HarnessError {
    /// True for errors that are the caller's configuration, not a failed run.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::Env(_)
                | HarnessError::Policy(_)
                | HarnessError::Coupling(limit_theory::CouplingError::NotTwoArmed(_))
                | HarnessError::Recursion(limit_theory::RecursionError::NotTwoArmed(_))
        )
    }
}

fn gaussian_env(means: &[f64]) -> Result<BanditEnv, HarnessError> {
    Ok(BanditEnv::gaussian(means, 1.0)?)
}

/// Shared shape of fig1/fig2: histogram of sub-optimal plays per exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramFigureConfig {
    pub algo: Algorithm,
    /// Negative tail exponents, e.g. [-2, -3, -4, -5].
    pub exponents: Vec<f64>,
    pub horizon: u64,
    pub reps: u64,
    pub seed: u64,
    pub gap: f64,
    pub workers: Option<usize>,
}

impl HistogramFigureConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.exponents.iter().any(|&e| e >= 0.0) {
            return Err(HarnessError::Config(
                "tail exponents must be negative".into(),
            ));
        }
        Ok(())
    }

    pub fn defaults(algo: Algorithm) -> Self {
        HistogramFigureConfig {
            algo,
            exponents: vec![-2.0, -3.0, -4.0, -5.0],
            horizon: 2000,
            reps: 10_000,
            seed: 1,
            gap: 0.3,
            workers: None,
        }
    }
}

#[derive(Debug)]
pub struct ExponentRun {
    pub exponent: f64,
    pub sigma2: f64,
    pub result: CampaignResult,
}

pub fn run_histogram_figure(cfg: &HistogramFigureConfig) -> Result<Vec<ExponentRun>, HarnessError> {
    cfg.validate()?;
    let env = gaussian_env(&[1.0, 1.0 - cfg.gap])?;
    let sigma0 = env.arms[0].std();
    let mut runs = Vec::new();
    for &exponent in &cfg.exponents {
        let sigma2 = design_variance_for_exponent(exponent, sigma0);
        let campaign = CampaignConfig {
            env: env.clone(),
            policy: PolicyConfig::new(cfg.algo, sigma2.sqrt())?,
            horizons: vec![cfg.horizon],
            replications: cfg.reps,
            master_seed: cfg.seed,
            worker_count: cfg.workers,
        };
        runs.push(ExponentRun {
            exponent,
            sigma2,
            result: run_campaign(&campaign)?,
        });
    }
    Ok(runs)
}

pub fn write_histogram_figure(
    run_dir: &Path,
    cfg: &HistogramFigureConfig,
    runs: &[ExponentRun],
) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for run in runs {
        let sub = run_dir.join(format!("exponent{:+.0}", run.exponent));
        write_campaign_outputs(&sub, &run.result.stats)?;
        files.push(sub.join("histogram.csv"));
        let h = &run.result.stats.per_horizon[0];
        let sub_arm = 1;
        let bars: Vec<(u64, u64)> = h.per_arm[sub_arm]
            .histogram
            .bins
            .iter()
            .map(|(&b, &c)| (b, c))
            .collect();
        let title = format!(
            "{:?} suboptimal-arm plays at T={} (tail exponent {:+.0})",
            cfg.algo, cfg.horizon, run.exponent
        );
        let svg = svg::bar_chart(
            &title,
            "plays of the sub-optimal arm",
            "replications",
            &bars,
        );
        let svg_path = sub.join("histogram.svg");
        fs::write(&svg_path, svg)?;
        files.push(svg_path);
    }
    Ok(files)
}

/// fig3 shape: observed/predicted ratio curves over horizons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioFigureConfig {
    pub algos: Vec<Algorithm>,
    pub exponents: Vec<f64>,
    pub horizons: Vec<u64>,
    pub reps: u64,
    pub seed: u64,
    pub gap: f64,
    pub workers: Option<usize>,
}

impl RatioFigureConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.exponents.iter().any(|&e| e >= 0.0) {
            return Err(HarnessError::Config(
                "tail exponents must be negative".into(),
            ));
        }
        Ok(())
    }
}

impl Default for RatioFigureConfig {
    fn default() -> Self {
        RatioFigureConfig {
            algos: vec![Algorithm::Ucb, Algorithm::Ts],
            exponents: vec![-1.0, -2.0, -5.0],
            horizons: vec![2000, 5000, 10_000, 20_000, 50_000],
            reps: 10_000,
            seed: 1,
            gap: 0.7,
            workers: None,
        }
    }
}

pub struct RatioSeries {
    pub algo: Algorithm,
    pub exponent: f64,
    pub sigma2: f64,
    pub curve: RatioCurve,
}

pub fn run_ratio_figure(cfg: &RatioFigureConfig) -> Result<Vec<RatioSeries>, HarnessError> {
    cfg.validate()?;
    let env = gaussian_env(&[1.0, 1.0 - cfg.gap])?;
    let sigma0 = env.arms[0].std();
    let mut series = Vec::new();
    for &algo in &cfg.algos {
        for &exponent in &cfg.exponents {
            let sigma2 = design_variance_for_exponent(exponent, sigma0);
            let sigma = sigma2.sqrt();
            let campaign = CampaignConfig {
                env: env.clone(),
                policy: PolicyConfig::new(algo, sigma)?,
                horizons: cfg.horizons.clone(),
                replications: cfg.reps,
                master_seed: cfg.seed,
                worker_count: cfg.workers,
            };
            let result = run_campaign(&campaign)?;
            let predictions = cfg
                .horizons
                .iter()
                .map(|&t| clt_params(&env, sigma, t))
                .collect::<Result<Vec<_>, _>>()?;
            let curve = ratio_curve(&result.stats, &predictions)?;
            series.push(RatioSeries {
                algo,
                exponent,
                sigma2,
                curve,
            });
        }
    }
    Ok(series)
}

pub fn write_ratio_figure(run_dir: &Path, series: &[RatioSeries]) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for s in series {
        let sub = run_dir.join(format!("{:?}-exponent{:+.0}", s.algo, s.exponent).to_lowercase());
        montecarlo::write_ratios(&sub, &s.curve)?;
        files.push(sub.join("ratios.csv"));
    }
    for (which, pick) in [("mean", true), ("std", false)] {
        let lines: Vec<svg::LineSeries> = series
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let points = s
                    .curve
                    .series(Series::Regret)
                    .iter()
                    .map(|p| {
                        (
                            p.horizon as f64,
                            if pick { p.mean_ratio } else { p.std_ratio },
                        )
                    })
                    .collect();
                svg::LineSeries {
                    label: format!("{:?} exponent {:+.0}", s.algo, s.exponent),
                    points,
                    dashed: s.algo == Algorithm::Ts,
                    color: svg::SERIES_COLORS[i % svg::SERIES_COLORS.len()],
                }
            })
            .collect();
        let svg_text = svg::line_chart(
            &format!("observed / predicted regret {which} ratio"),
            "horizon T",
            &format!("{which} ratio"),
            &lines,
        );
        let path = run_dir.join(format!("ratios_{which}.svg"));
        fs::write(&path, svg_text)?;
        files.push(path);
    }
    Ok(files)
}

fn diag_opts() -> SimOptions {
    SimOptions {
        record_play_times: true,
        record_rewards: true,
        checkpoints: vec![],
    }
}

/// Coupling-sandwich diagnostic run (TS, two arms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRunConfig {
    pub means: Vec<f64>,
    pub sigma: f64,
    /// None picks 0.96 of the admissible sup (0.48 * (gap/sigma)^2).
    pub eps: Option<f64>,
    pub horizon: u64,
    pub reps: u64,
    pub seed: u64,
}

impl CouplingRunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.means.len() != 2 {
            return Err(limit_theory::CouplingError::NotTwoArmed(self.means.len()).into());
        }
        Ok(())
    }
}

impl Default for CouplingRunConfig {
    fn default() -> Self {
        CouplingRunConfig {
            means: vec![1.0, 0.5],
            sigma: 1.0,
            eps: None,
            horizon: 100_000,
            reps: 1,
            seed: 1,
        }
    }
}

pub fn run_coupling(cfg: &CouplingRunConfig) -> Result<Vec<CouplingReport>, HarnessError> {
    cfg.validate()?;
    let env = gaussian_env(&cfg.means)?;
    let policy = PolicyConfig::ts(cfg.sigma)?;
    let sub = if env.k_star == 0 { 1 } else { 0 };
    let scaled = env.gaps[sub] / cfg.sigma;
    let eps = cfg.eps.unwrap_or(0.48 * scaled * scaled);
    let mut reports = Vec::with_capacity(cfg.reps as usize);
    for r in 0..cfg.reps {
        let traj = run_trajectory(
            &env,
            &policy,
            cfg.horizon,
            SeedSpec::new(cfg.seed, r),
            &diag_opts(),
        )?;
        reports.push(sandwich_check(&traj, &env, cfg.sigma, eps)?);
    }
    Ok(reports)
}

pub fn write_coupling(run_dir: &Path, reports: &[CouplingReport]) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for (r, report) in reports.iter().enumerate() {
        let path = run_dir.join(format!("coupling-rep{r:04}.csv"));
        fs::write(&path, report.to_csv())?;
        files.push(path);
        let (early, late) = report.half_fractions();
        summary.push(serde_json::json!({
            "replication": r,
            "early": early,
            "late": late,
        }));
    }
    let sidecar = run_dir.join("coupling.json");
    let body = serde_json::json!({
        "config": reports.first().map(|r| serde_json::from_str::<serde_json::Value>(&r.sidecar_json()).unwrap()),
        "per_replication_fractions": summary,
    });
    fs::write(&sidecar, serde_json::to_string_pretty(&body).unwrap())?;
    files.push(sidecar);
    Ok(files)
}

/// UCB recursion-identity check run (two arms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionRunConfig {
    pub means: Vec<f64>,
    pub sigma: f64,
    pub horizon: u64,
    pub reps: u64,
    pub seed: u64,
}

impl RecursionRunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.means.len() != 2 {
            return Err(limit_theory::RecursionError::NotTwoArmed(self.means.len()).into());
        }
        Ok(())
    }
}

impl Default for RecursionRunConfig {
    fn default() -> Self {
        RecursionRunConfig {
            means: vec![1.0, 0.5],
            sigma: 1.0,
            horizon: 10_000,
            reps: 1,
            seed: 1,
        }
    }
}

pub fn run_recursion(cfg: &RecursionRunConfig) -> Result<Vec<UcbRecursionCheck>, HarnessError> {
    cfg.validate()?;
    let env = gaussian_env(&cfg.means)?;
    let policy = PolicyConfig::ucb(cfg.sigma)?;
    let mut checks = Vec::with_capacity(cfg.reps as usize);
    for r in 0..cfg.reps {
        let traj = run_trajectory(
            &env,
            &policy,
            cfg.horizon,
            SeedSpec::new(cfg.seed, r),
            &diag_opts(),
        )?;
        checks.push(verify_ucb_recursion(&traj, &env, cfg.sigma)?);
    }
    Ok(checks)
}

pub fn write_recursion(run_dir: &Path, checks: &[UcbRecursionCheck]) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for (r, check) in checks.iter().enumerate() {
        let path = run_dir.join(format!("recursion-rep{r:04}.csv"));
        fs::write(&path, check.to_csv())?;
        files.push(path);
        summary.push(serde_json::json!({
            "replication": r,
            "entries": check.entries.len(),
            "mismatches": check.mismatches(),
            "all_match": check.all_match(),
        }));
    }
    let all = checks.iter().all(|c| c.all_match());
    let sidecar = run_dir.join("recursion.json");
    let body = serde_json::json!({
        "config": checks.first().map(|c| serde_json::from_str::<serde_json::Value>(&c.sidecar_json()).unwrap()),
        "all_match": all,
        "per_replication": summary,
    });
    fs::write(&sidecar, serde_json::to_string_pretty(&body).unwrap())?;
    files.push(sidecar);
    Ok(files)
}
