//! The two policies: sigma-tuned Thompson sampling and UCB.
//!
//! Thompson sampling scores arm k as
//! `sums_k/(1+n_k) + sigma * z_k / sqrt(1+n_k)`; the shrunk sample mean and
//! the posterior scale both come from a N(0, sigma^2) prior on the arm mean.
//! UCB scores arm k as `sums_k/n_k + sigma * sqrt(2 ln(t+1) / n_k)` with the
//! plain sample mean. Ties break toward the lowest arm index in both cases,
//! and logarithms are natural throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("UCB index is undefined at zero plays")]
    ZeroCount,
    #[error("UCB selection requires every arm to have been played; arm {0} has no plays")]
    NotInitialized(usize),
    #[error("design std must be positive, got {0}")]
    BadDesignStd(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ts,
    Ucb,
}

/// Deterministic tie rule. Only one rule is supported; it is part of the
/// reproducibility contract.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub algorithm: Algorithm,
    /// The sigma the algorithm is designed for (design variance sigma^2).
    pub design_std: f64,
    pub tie_break: TieBreak,
}

impl PolicyConfig {
    pub fn new(algorithm: Algorithm, design_std: f64) -> Result<Self, PolicyError> {
        if !design_std.is_finite() || design_std <= 0.0 {
            return Err(PolicyError::BadDesignStd(design_std));
        }
        Ok(PolicyConfig {
            algorithm,
            design_std,
            tie_break: TieBreak::LowestIndex,
        })
    }

    pub fn ts(design_std: f64) -> Result<Self, PolicyError> {
        Self::new(Algorithm::Ts, design_std)
    }

    pub fn ucb(design_std: f64) -> Result<Self, PolicyError> {
        Self::new(Algorithm::Ucb, design_std)
    }

    /// TS prior mean on every arm (fixed).
    pub fn prior_mean(&self) -> f64 {
        0.0
    }

    /// TS prior std on every arm (fixed at the design sigma).
    pub fn prior_std(&self) -> f64 {
        self.design_std
    }
}

/// Per-arm sufficient statistics plus the clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyState {
    pub t: u64,
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
}

impl PolicyState {
    pub fn new(arm_count: usize) -> Self {
        PolicyState {
            t: 0,
            counts: vec![0; arm_count],
            sums: vec![0.0; arm_count],
        }
    }

    pub fn arm_count(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn record_play(&mut self, arm: usize, reward: f64) {
        self.t += 1;
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        debug_assert_eq!(self.counts.iter().sum::<u64>(), self.t);
    }

    /// The TS estimator sums/(1+n); well-defined at n = 0.
    #[inline]
    pub fn shrunk_mean(&self, arm: usize) -> f64 {
        self.sums[arm] / (1.0 + self.counts[arm] as f64)
    }

    /// The UCB estimator sums/n; undefined at n = 0.
    #[inline]
    pub fn sample_mean(&self, arm: usize) -> Result<f64, PolicyError> {
        if self.counts[arm] == 0 {
            return Err(PolicyError::ZeroCount);
        }
        Ok(self.sums[arm] / self.counts[arm] as f64)
    }
}

/// Thompson sampling selection given one standard normal draw per arm.
///
/// Returns the argmax of the posterior samples; ties go to the lowest index.
pub fn ts_select(state: &PolicyState, config: &PolicyConfig, noise: &[f64]) -> usize {
    debug_assert_eq!(noise.len(), state.arm_count());
    let sigma = config.design_std;
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, &z) in noise.iter().enumerate() {
        let scale = (1.0 + state.counts[k] as f64).sqrt();
        let score = state.shrunk_mean(k) + sigma * z / scale;
        if score > best_score {
            best_score = score;
            best = k;
        }
    }
    best
}

/// The UCB index `mean_hat + sigma * sqrt(2 ln(t_next) / n)`.
pub fn ucb_index(mean_hat: f64, n: u64, t_next: u64, sigma: f64) -> Result<f64, PolicyError> {
    if n == 0 {
        return Err(PolicyError::ZeroCount);
    }
    Ok(mean_hat + sigma * (2.0 * (t_next as f64).ln() / n as f64).sqrt())
}

/// UCB selection at time t+1; every arm must have at least one play.
pub fn ucb_select(state: &PolicyState, config: &PolicyConfig) -> Result<usize, PolicyError> {
    if let Some(k) = state.counts.iter().position(|&n| n == 0) {
        return Err(PolicyError::NotInitialized(k));
    }
    let t_next = state.t + 1;
    let sigma = config.design_std;
    let log_term = 2.0 * (t_next as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for k in 0..state.arm_count() {
        let n = state.counts[k] as f64;
        let score = state.sums[k] / n + sigma * (log_term / n).sqrt();
        if score > best_score {
            best_score = score;
            best = k;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(counts: &[u64], sums: &[f64]) -> PolicyState {
        PolicyState {
            t: counts.iter().sum(),
            counts: counts.to_vec(),
            sums: sums.to_vec(),
        }
    }

    #[test]
    fn ts_prior_argmax_at_time_zero() {
        let cfg = PolicyConfig::ts(1.0).unwrap();
        let s = PolicyState::new(2);
        assert_eq!(ts_select(&s, &cfg, &[1.3, -0.2]), 0);
        assert_eq!(ts_select(&s, &cfg, &[-0.4, 0.1]), 1);
    }

    #[test]
    fn ts_zero_noise_argmax_of_shrunk_means() {
        let cfg = PolicyConfig::ts(1.0).unwrap();
        let s = state(&[9, 0], &[10.0, 0.0]);
        // 10/10 = 1 beats 0
        assert_eq!(ts_select(&s, &cfg, &[0.0, 0.0]), 0);
    }

    #[test]
    fn ts_ties_go_to_lowest_index() {
        let cfg = PolicyConfig::ts(1.0).unwrap();
        let s = PolicyState::new(3);
        assert_eq!(ts_select(&s, &cfg, &[0.5, 0.5, 0.5]), 0);
    }

    #[test]
    fn ts_symmetric_arms_are_picked_equally_often() {
        use crate::rng::{CounterRng, StreamPurpose};
        let cfg = PolicyConfig::ts(1.0).unwrap();
        let s = PolicyState::new(2);
        let mut rng = CounterRng::stream(2024, 0, 0, StreamPurpose::TsNoise);
        let n = 100_000;
        let mut ones = 0u64;
        for _ in 0..n {
            let z = [rng.next_normal(), rng.next_normal()];
            if ts_select(&s, &cfg, &z) == 1 {
                ones += 1;
            }
        }
        let freq = ones as f64 / n as f64;
        let se = 0.5 / (n as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * se, "freq={freq}");
    }

    #[test]
    fn ucb_index_reference_values() {
        // frozen from 30-digit evaluations of mean + sigma*sqrt(2 ln t / n)
        let v = ucb_index(0.5, 4, 100, 1.0).unwrap();
        assert!((v - 2.0174271293851464).abs() < 1e-12);
        let v = ucb_index(0.0, 1, 3, 1.0).unwrap();
        assert!((v - 1.482303807367511).abs() < 1e-12);
    }

    #[test]
    fn ucb_index_has_no_bonus_at_t_one() {
        for &m in &[-2.0, 0.0, 0.5] {
            assert_eq!(ucb_index(m, 7, 1, 1.0).unwrap(), m);
        }
    }

    #[test]
    fn ucb_index_rejects_zero_count() {
        assert_eq!(
            ucb_index(0.0, 0, 10, 1.0).unwrap_err(),
            PolicyError::ZeroCount
        );
    }

    #[test]
    fn ucb_index_monotone_in_t_and_antitone_in_n() {
        let mut prev = ucb_index(0.0, 5, 2, 1.0).unwrap();
        for t in 3..40 {
            let cur = ucb_index(0.0, 5, t, 1.0).unwrap();
            assert!(cur > prev);
            prev = cur;
        }
        let mut prev = ucb_index(0.0, 1, 50, 1.0).unwrap();
        for n in 2..40 {
            let cur = ucb_index(0.0, n, 50, 1.0).unwrap();
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn ucb_select_tie_goes_to_lowest_index() {
        let cfg = PolicyConfig::ucb(1.0).unwrap();
        let s = state(&[3, 3], &[1.5, 1.5]);
        assert_eq!(ucb_select(&s, &cfg).unwrap(), 0);
    }

    #[test]
    fn ucb_select_prefers_larger_bonus_at_equal_means() {
        let cfg = PolicyConfig::ucb(1.0).unwrap();
        // equal sample means, counts 100 vs 1, clock forced so t+1 = 200
        let mut s = state(&[100, 1], &[50.0, 0.5]);
        s.t = 199;
        assert_eq!(ucb_select(&s, &cfg).unwrap(), 1);
    }

    #[test]
    fn ucb_select_reference_indices() {
        let cfg = PolicyConfig::ucb(1.0).unwrap();
        let mut s = state(&[2, 2], &[1.0, 0.0]);
        s.t = 9; // t+1 = 10
                 // indices: 0.5 + sqrt(ln 10) and 0.0 + sqrt(ln 10)
        let i0 = ucb_index(0.5, 2, 10, 1.0).unwrap();
        let i1 = ucb_index(0.0, 2, 10, 1.0).unwrap();
        assert!((i0 - 2.0174271293851464).abs() < 1e-12);
        assert!((i1 - 1.5174271293851464).abs() < 1e-12);
        assert_eq!(ucb_select(&s, &cfg).unwrap(), 0);
    }

    #[test]
    fn ucb_select_requires_initialization() {
        let cfg = PolicyConfig::ucb(1.0).unwrap();
        let s = state(&[1, 0], &[0.3, 0.0]);
        assert_eq!(
            ucb_select(&s, &cfg).unwrap_err(),
            PolicyError::NotInitialized(1)
        );
    }

    #[test]
    fn config_rejects_nonpositive_sigma() {
        assert!(PolicyConfig::ts(0.0).is_err());
        assert!(PolicyConfig::ucb(-1.0).is_err());
        let cfg = PolicyConfig::ts(2.0).unwrap();
        assert_eq!(cfg.prior_mean(), 0.0);
        assert_eq!(cfg.prior_std(), 2.0);
    }
}
