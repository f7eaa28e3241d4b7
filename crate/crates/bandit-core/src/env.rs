//! Arm reward distributions and the bandit environment.
//!
//! Four reward families with closed-form moments are supported; each arm
//! stores its exact mean and variance alongside the raw parameters, and each
//! family samples by inverse CDF from a single uniform.

use crate::normal::normal_quantile;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("environment needs at least 2 arms, got {0}")]
    EmptyEnv(usize),
    #[error("maximal mean {0} is attained by more than one arm")]
    DuplicateOptimum(f64),
    #[error("invalid arm parameters: {0}")]
    InvalidArm(String),
}

/// Reward distribution family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardKind {
    Gaussian,
    Uniform,
    ShiftedExponential,
    ScaledBernoulli,
}

/// One arm: family, raw parameters, and closed-form moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub kind: RewardKind,
    pub params: [f64; 2],
    pub mean: f64,
    pub variance: f64,
}

impl ArmSpec {
    /// N(mean, std^2).
    pub fn gaussian(mean: f64, std: f64) -> Result<Self, EnvError> {
        if !mean.is_finite() || !std.is_finite() || std < 0.0 {
            return Err(EnvError::InvalidArm(format!(
                "gaussian(mean={mean}, std={std})"
            )));
        }
        Ok(ArmSpec {
            kind: RewardKind::Gaussian,
            params: [mean, std],
            mean,
            variance: std * std,
        })
    }

    /// Uniform on [lo, hi].
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, EnvError> {
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(EnvError::InvalidArm(format!("uniform(lo={lo}, hi={hi})")));
        }
        let width = hi - lo;
        Ok(ArmSpec {
            kind: RewardKind::Uniform,
            params: [lo, hi],
            mean: lo + width / 2.0,
            variance: width * width / 12.0,
        })
    }

    /// shift + Exponential(rate).
    pub fn shifted_exponential(rate: f64, shift: f64) -> Result<Self, EnvError> {
        if !rate.is_finite() || !shift.is_finite() || rate <= 0.0 {
            return Err(EnvError::InvalidArm(format!(
                "shifted_exponential(rate={rate}, shift={shift})"
            )));
        }
        Ok(ArmSpec {
            kind: RewardKind::ShiftedExponential,
            params: [rate, shift],
            mean: shift + 1.0 / rate,
            variance: 1.0 / (rate * rate),
        })
    }

    /// scale * Bernoulli(p).
    pub fn scaled_bernoulli(p: f64, scale: f64) -> Result<Self, EnvError> {
        if !p.is_finite() || !scale.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(EnvError::InvalidArm(format!(
                "scaled_bernoulli(p={p}, scale={scale})"
            )));
        }
        Ok(ArmSpec {
            kind: RewardKind::ScaledBernoulli,
            params: [p, scale],
            mean: scale * p,
            variance: scale * scale * p * (1.0 - p),
        })
    }

    /// Inverse-CDF sample from one uniform on (0, 1).
    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        match self.kind {
            RewardKind::Gaussian => self.params[0] + self.params[1] * normal_quantile(u),
            RewardKind::Uniform => self.params[0] + (self.params[1] - self.params[0]) * u,
            RewardKind::ShiftedExponential => self.params[1] - u.ln() / self.params[0],
            RewardKind::ScaledBernoulli => {
                if u < self.params[0] {
                    self.params[1]
                } else {
                    0.0
                }
            }
        }
    }

    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// An ordered set of arms with a unique optimal arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditEnv {
    pub arms: Vec<ArmSpec>,
    /// Index of the unique arm with maximal mean.
    pub k_star: usize,
    /// Per-arm mean gaps to the optimum; zero exactly at `k_star`.
    pub gaps: Vec<f64>,
}

impl BanditEnv {
    pub fn new(arms: Vec<ArmSpec>) -> Result<Self, EnvError> {
        if arms.len() < 2 {
            return Err(EnvError::EmptyEnv(arms.len()));
        }
        let best = arms
            .iter()
            .map(|a| a.mean)
            .fold(f64::NEG_INFINITY, f64::max);
        if arms.iter().filter(|a| a.mean == best).count() != 1 {
            return Err(EnvError::DuplicateOptimum(best));
        }
        let k_star = arms.iter().position(|a| a.mean == best).unwrap();
        let gaps = arms.iter().map(|a| best - a.mean).collect();
        Ok(BanditEnv { arms, k_star, gaps })
    }

    /// Convenience: Gaussian arms with the given means and a common std.
    pub fn gaussian(means: &[f64], std: f64) -> Result<Self, EnvError> {
        let arms = means
            .iter()
            .map(|&m| ArmSpec::gaussian(m, std))
            .collect::<Result<Vec<_>, _>>()?;
        BanditEnv::new(arms)
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    /// Pseudo-regret for the given play counts.
    pub fn regret(&self, counts: &[u64]) -> f64 {
        self.gaps
            .iter()
            .zip(counts)
            .map(|(&gap, &n)| gap * n as f64)
            .sum()
    }

    /// Indices of arms other than the optimal one.
    pub fn suboptimal_arms(&self) -> Vec<usize> {
        (0..self.arms.len()).filter(|&k| k != self.k_star).collect()
    }
}
