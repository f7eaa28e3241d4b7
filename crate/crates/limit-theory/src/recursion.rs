//! Exact consistency check for UCB play times in two-armed environments.
//!
//! Between consecutive plays of the sub-optimal arm the optimal arm is played
//! at every step, so with j sub-optimal plays the next play time is exactly
//! the first integer t past the previous one whose logarithm clears the
//! crossing exponent:
//!
//! ```text
//! T(j+1) = inf{ t > T(j) : ln t > S_j(t) }
//! S_j(t) = (j / (2 sigma^2)) * sgn(b) * b^2
//! b      = gap - (mu_hat_sub(j) - mu_sub) + (mu_hat_opt(n_opt(t-1)) - mu_opt)
//!          + sigma * sqrt(2 ln t / n_opt(t-1))
//! ```
//!
//! The signed square is the exact inversion of the index inequality: when
//! b < 0 the sub-optimal index dominates outright, which a plain square would
//! misreport. The verifier reconstructs each T(j+1) by walking t through the
//! crossing condition on the recorded reward history and demands equality.
//! The familiar one-shot shortcut 1 + floor(T(j) v exp(S_j)) with the
//! exponent frozen at the crossing time is only valid when the exponent moves
//! slowly (its asymptotic regime); the crossing scan is the form that is
//! exact at every j. Comparisons run in log space so nothing overflows.

use crate::coupling::CouplingError;
use bandit_core::{Algorithm, BanditEnv, TrajectoryRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RecursionError {
    #[error("recursion check requires a two-armed environment, got {0} arms")]
    NotTwoArmed(usize),
    #[error("recursion check requires a UCB trajectory")]
    NotUcb,
    #[error("trajectory record is missing {0}")]
    MissingRecord(&'static str),
    #[error("trajectory record is inconsistent: {0}")]
    RecordMismatch(String),
}

impl From<CouplingError> for RecursionError {
    fn from(e: CouplingError) -> Self {
        match e {
            CouplingError::MissingRecord(what) => RecursionError::MissingRecord(what),
            other => RecursionError::RecordMismatch(other.to_string()),
        }
    }
}

/// One reconstructed play time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionEntry {
    /// Plays of the sub-optimal arm before the reconstructed time.
    pub j: u64,
    /// Recorded T(j+1).
    pub recorded: u64,
    /// First crossing of the exponent condition after T(j); None when no
    /// crossing occurs at or before the recorded time.
    pub reconstructed: Option<u64>,
    /// The exponent statistic S_j evaluated at the recorded time.
    pub statistic: f64,
    pub matches: bool,
}

/// Outcome of [`verify_ucb_recursion`] on one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcbRecursionCheck {
    pub suboptimal_arm: usize,
    pub horizon: u64,
    pub sigma: f64,
    pub entries: Vec<RecursionEntry>,
}

impl UcbRecursionCheck {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|e| e.matches)
    }

    pub fn mismatches(&self) -> usize {
        self.entries.iter().filter(|e| !e.matches).count()
    }

    pub fn csv_header() -> &'static str {
        "j,recorded,reconstructed,statistic,matches"
    }

    pub fn csv_row(e: &RecursionEntry) -> String {
        format!(
            "{},{},{},{},{}",
            e.j,
            e.recorded,
            e.reconstructed.map(|v| v.to_string()).unwrap_or_default(),
            e.statistic,
            e.matches
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for e in &self.entries {
            out.push_str(&Self::csv_row(e));
            out.push('\n');
        }
        out
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "suboptimal_arm": self.suboptimal_arm,
            "horizon": self.horizon,
            "sigma": self.sigma,
            "entries": self.entries.len(),
            "all_match": self.all_match(),
        })
        .to_string()
    }
}

struct ArmHistory {
    times: Vec<u64>,
    prefix: Vec<f64>,
}

impl ArmHistory {
    fn new(times: &[u64], rewards: &[f64]) -> Result<Self, RecursionError> {
        if times.len() != rewards.len() {
            return Err(RecursionError::RecordMismatch(format!(
                "{} play times but {} rewards",
                times.len(),
                rewards.len()
            )));
        }
        let mut prefix = Vec::with_capacity(rewards.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &x in rewards {
            acc += x;
            prefix.push(acc);
        }
        Ok(ArmHistory {
            times: times.to_vec(),
            prefix,
        })
    }

    /// Number of plays strictly before time t.
    fn plays_before(&self, t: u64) -> u64 {
        self.times.partition_point(|&s| s < t) as u64
    }

    fn mean_of_first(&self, n: u64) -> f64 {
        self.prefix[n as usize] / n as f64
    }
}

/// Reconstruct every sub-optimal play time after the first from the recorded
/// reward history via the log-crossing condition, and compare exactly.
pub fn verify_ucb_recursion(
    traj: &TrajectoryRecord,
    env: &BanditEnv,
    sigma: f64,
) -> Result<UcbRecursionCheck, RecursionError> {
    if env.arm_count() != 2 {
        return Err(RecursionError::NotTwoArmed(env.arm_count()));
    }
    if traj.policy.algorithm != Algorithm::Ucb {
        return Err(RecursionError::NotUcb);
    }
    let play_times = traj
        .play_times
        .as_ref()
        .ok_or(RecursionError::MissingRecord("play_times"))?;
    let rewards = traj
        .rewards
        .as_ref()
        .ok_or(RecursionError::MissingRecord("rewards"))?;

    let opt = env.k_star;
    let sub = 1 - opt;
    let mu_opt = env.arms[opt].mean;
    let mu_sub = env.arms[sub].mean;
    let gap = env.gaps[sub];

    let opt_hist = ArmHistory::new(&play_times[opt], &rewards[opt])?;
    let sub_hist = ArmHistory::new(&play_times[sub], &rewards[sub])?;

    // S_j at candidate time t, from recorded data only
    let exponent = |j: u64, t: u64| -> Result<f64, RecursionError> {
        let n_opt = opt_hist.plays_before(t);
        if n_opt == 0 {
            return Err(RecursionError::RecordMismatch(format!(
                "no optimal-arm plays before time {t}"
            )));
        }
        let mu_hat_sub = sub_hist.mean_of_first(j);
        let mu_hat_opt = opt_hist.mean_of_first(n_opt);
        let bonus = sigma * (2.0 * (t as f64).ln() / n_opt as f64).sqrt();
        let bracket = gap - (mu_hat_sub - mu_sub) + (mu_hat_opt - mu_opt) + bonus;
        Ok(j as f64 / (2.0 * sigma * sigma) * bracket * bracket.abs())
    };

    let mut entries = Vec::new();
    for j in 1..sub_hist.times.len() as u64 {
        let t_prev = sub_hist.times[j as usize - 1];
        let recorded = sub_hist.times[j as usize];
        // index decisions begin only after the two forced initialization plays
        let first_candidate = (t_prev + 1).max(3);
        let mut reconstructed = None;
        for t in first_candidate..=recorded {
            if (t as f64).ln() > exponent(j, t)? {
                reconstructed = Some(t);
                break;
            }
        }
        let statistic = exponent(j, recorded)?;
        entries.push(RecursionEntry {
            j,
            recorded,
            reconstructed,
            statistic,
            matches: reconstructed == Some(recorded),
        });
    }

    Ok(UcbRecursionCheck {
        suboptimal_arm: sub,
        horizon: traj.horizon,
        sigma,
        entries,
    })
}
