//! Deterministic parallel replication campaigns.
//!
//! Replication r draws every random value from streams keyed by
//! `(master_seed, r)`, so each replication is a pure function of its index.
//! Workers only produce per-replication snapshots; aggregation always folds
//! them in replication order, which makes the serialized statistics
//! byte-identical for any worker count.

use crate::stats::{independence_check, ks_normal, Histogram, Moments};
use bandit_core::{
    run_trajectory_observed, Algorithm, BanditEnv, PolicyConfig, PolicyState, SeedSpec, SimError,
    SimOptions, StepObserver,
};
use limit_theory::{clt_params, PredictError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid campaign config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error("worker pool failed to build: {0}")]
    Pool(String),
}

/// Everything a campaign needs; serializable so manifests can echo it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub env: BanditEnv,
    pub policy: PolicyConfig,
    /// Horizons at which statistics are captured; strictly increasing.
    pub horizons: Vec<u64>,
    pub replications: u64,
    pub master_seed: u64,
    /// Worker-count hint; None uses the default pool. Results never depend
    /// on this value.
    #[serde(default)]
    pub worker_count: Option<usize>,
}

impl CampaignConfig {
    fn validate(&self) -> Result<(), CampaignError> {
        if self.horizons.is_empty() {
            return Err(CampaignError::InvalidConfig("horizons are empty".into()));
        }
        if !self.horizons.windows(2).all(|w| w[0] < w[1]) {
            return Err(CampaignError::InvalidConfig(
                "horizons must be strictly increasing".into(),
            ));
        }
        if self.replications == 0 {
            return Err(CampaignError::InvalidConfig(
                "replications must be >= 1".into(),
            ));
        }
        let minimum = match self.policy.algorithm {
            Algorithm::Ucb => self.env.arm_count() as u64,
            Algorithm::Ts => 1,
        };
        if self.horizons[0] < minimum {
            return Err(CampaignError::InvalidConfig(format!(
                "first horizon {} is below the policy minimum {minimum}",
                self.horizons[0]
            )));
        }
        Ok(())
    }

    pub fn max_horizon(&self) -> u64 {
        *self.horizons.last().expect("validated nonempty")
    }
}

/// Per-horizon capture of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RepSnapshot {
    /// (counts per arm, regret) at each configured horizon.
    pub at_horizon: Vec<(Vec<u64>, f64)>,
}

struct HorizonCapture<'a> {
    horizons: &'a [u64],
    gaps: &'a [f64],
    next: usize,
    captured: Vec<(Vec<u64>, f64)>,
}

impl StepObserver for HorizonCapture<'_> {
    fn after_step(&mut self, state: &PolicyState, _arm: usize, _reward: f64) {
        if self.next < self.horizons.len() && state.t == self.horizons[self.next] {
            let regret: f64 = self
                .gaps
                .iter()
                .zip(&state.counts)
                .map(|(&g, &n)| g * n as f64)
                .sum();
            self.captured.push((state.counts.clone(), regret));
            self.next += 1;
        }
    }
}

/// Statistics for one arm at one horizon.
///
/// The two KS fields are distinct standardization paths and are never mixed:
/// `ks_clt` standardizes by the CLT-predicted mean and std (the convergence
/// claim is to that specific normal), `ks_empirical` by the sample's own
/// moments (pure shape).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub moments: Moments,
    pub histogram: Histogram,
    /// KS distance of CLT-standardized counts to N(0,1); None for the
    /// optimal arm, degenerate horizons, or single-replication runs.
    pub ks_clt: Option<f64>,
    /// KS distance of empirically standardized counts to N(0,1).
    pub ks_empirical: Option<f64>,
}

/// Statistics at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonStats {
    pub horizon: u64,
    pub per_arm: Vec<ArmStats>,
    pub regret: Moments,
    /// Pearson correlations between sub-optimal arm counts; None when fewer
    /// than two sub-optimal arms, or a column is degenerate.
    pub correlations: Option<Vec<Vec<f64>>>,
    /// Which arms the correlation matrix indexes.
    pub correlation_arms: Vec<usize>,
}

/// Cross-replication statistics for a whole campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationStats {
    pub replications: u64,
    pub horizons: Vec<u64>,
    pub per_horizon: Vec<HorizonStats>,
    /// False on single-replication campaigns.
    pub variance_defined: bool,
}

impl ReplicationStats {
    pub fn horizon(&self, t: u64) -> Option<&HorizonStats> {
        self.per_horizon.iter().find(|h| h.horizon == t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Raw per-replication samples, retained for KS/correlations and optional
/// capped dumps. Indexed `[horizon][arm][replication]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSamples {
    pub horizons: Vec<u64>,
    pub counts: Vec<Vec<Vec<u64>>>,
    /// Indexed `[horizon][replication]`.
    pub regrets: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub stats: ReplicationStats,
    pub raw: RawSamples,
}

/// Simulate one replication of the campaign.
pub fn run_replication(config: &CampaignConfig, replication: u64) -> Result<RepSnapshot, SimError> {
    let mut capture = HorizonCapture {
        horizons: &config.horizons,
        gaps: &config.env.gaps,
        next: 0,
        captured: Vec::with_capacity(config.horizons.len()),
    };
    run_trajectory_observed(
        &config.env,
        &config.policy,
        config.max_horizon(),
        SeedSpec::new(config.master_seed, replication),
        &SimOptions::default(),
        &mut capture,
    )?;
    debug_assert_eq!(capture.captured.len(), config.horizons.len());
    Ok(RepSnapshot {
        at_horizon: capture.captured,
    })
}

/// Fold snapshots (in replication order) into campaign statistics.
pub fn aggregate(
    config: &CampaignConfig,
    snapshots: &[RepSnapshot],
) -> Result<CampaignResult, CampaignError> {
    let arms = config.env.arm_count();
    let horizons = &config.horizons;
    let reps = snapshots.len() as u64;

    let mut counts_raw = vec![vec![Vec::with_capacity(snapshots.len()); arms]; horizons.len()];
    let mut regrets_raw = vec![Vec::with_capacity(snapshots.len()); horizons.len()];
    let mut arm_moments = vec![vec![Moments::new(); arms]; horizons.len()];
    let mut arm_hist = vec![vec![Histogram::new(); arms]; horizons.len()];
    let mut regret_moments = vec![Moments::new(); horizons.len()];

    for snap in snapshots {
        for (h, (counts, regret)) in snap.at_horizon.iter().enumerate() {
            for (k, &c) in counts.iter().enumerate() {
                counts_raw[h][k].push(c);
                arm_moments[h][k].push(c as f64);
                arm_hist[h][k].add(c);
            }
            regrets_raw[h].push(*regret);
            regret_moments[h].push(*regret);
        }
    }

    let suboptimal = config.env.suboptimal_arms();
    let mut per_horizon = Vec::with_capacity(horizons.len());
    for (h, &horizon) in horizons.iter().enumerate() {
        let prediction = clt_params(&config.env, config.policy.design_std, horizon)?;
        let clt = prediction.clt.as_ref().expect("clt fields populated");

        let mut per_arm = Vec::with_capacity(arms);
        for k in 0..arms {
            let samples: Vec<f64> = counts_raw[h][k].iter().map(|&c| c as f64).collect();
            let ks_clt = match (clt.per_arm_mean[k], clt.per_arm_std[k]) {
                (Some(mean), Some(std)) if std > 0.0 && reps >= 2 => {
                    ks_normal(&samples, mean, std).ok()
                }
                _ => None,
            };
            let moments = arm_moments[h][k].clone();
            let ks_empirical = match moments.std() {
                Some(std) if std > 0.0 => ks_normal(&samples, moments.mean(), std).ok(),
                _ => None,
            };
            per_arm.push(ArmStats {
                moments,
                histogram: arm_hist[h][k].clone(),
                ks_clt,
                ks_empirical,
            });
        }

        let correlations = if suboptimal.len() >= 2 && reps >= 2 {
            let columns: Vec<Vec<f64>> = suboptimal
                .iter()
                .map(|&k| counts_raw[h][k].iter().map(|&c| c as f64).collect())
                .collect();
            independence_check(&columns).ok()
        } else {
            None
        };

        per_horizon.push(HorizonStats {
            horizon,
            per_arm,
            regret: regret_moments[h].clone(),
            correlations,
            correlation_arms: suboptimal.clone(),
        });
    }

    Ok(CampaignResult {
        stats: ReplicationStats {
            replications: reps,
            horizons: horizons.clone(),
            per_horizon,
            variance_defined: reps >= 2,
        },
        raw: RawSamples {
            horizons: horizons.clone(),
            counts: counts_raw,
            regrets: regrets_raw,
        },
    })
}

/// Run all replications (in parallel when a pool is available) and aggregate
/// deterministically.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResult, CampaignError> {
    config.validate()?;
    let reps: Vec<u64> = (0..config.replications).collect();
    let simulate = |&r: &u64| run_replication(config, r);

    let snapshots: Result<Vec<RepSnapshot>, SimError> = match config.worker_count {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| CampaignError::Pool(e.to_string()))?;
            pool.install(|| reps.par_iter().map(simulate).collect())
        }
        None => reps.par_iter().map(simulate).collect(),
    };
    aggregate(config, &snapshots?)
}
