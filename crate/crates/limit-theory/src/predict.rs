//! Closed-form limit predictions for play counts and regret.
//!
//! For a policy designed for Gaussian rewards with variance sigma^2, each
//! sub-optimal arm k with gap gap_k satisfies
//!
//! * SLLN: N_k(T)/ln T -> 2 sigma^2 / gap_k^2 almost surely, so regret obeys
//!   R(T)/ln T -> sum 2 sigma^2 / gap_k;
//! * CLT: N_k(T) is asymptotically normal with mean 2 sigma^2 ln T / gap_k^2
//!   and std (2 sigma sigma_k / gap_k^2) sqrt(2 ln T), where sigma_k^2 is the
//!   true reward variance of arm k; sub-optimal counts are asymptotically
//!   independent, so regret variance is the gap^2-weighted sum.
//!
//! Natural logarithms throughout.

use bandit_core::BanditEnv;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("sub-optimal arm {0} has zero gap")]
    ZeroGap(usize),
    #[error("design std must be positive, got {0}")]
    BadSigma(f64),
}

/// CLT centering and scale at a fixed horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltParams {
    pub horizon: u64,
    /// Set when horizon < 2 (ln T = 0 makes the scale collapse).
    pub degenerate: bool,
    /// Per arm; `None` at the optimal arm.
    pub per_arm_mean: Vec<Option<f64>>,
    pub per_arm_std: Vec<Option<f64>>,
    pub regret_mean: f64,
    pub regret_std: f64,
}

/// Limit-theorem predictions for one environment and design sigma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPrediction {
    pub sigma: f64,
    /// 2 sigma^2 / gap_k^2 per arm; `None` at the optimal arm.
    pub per_arm_slln_slope: Vec<Option<f64>>,
    /// sum over sub-optimal arms of 2 sigma^2 / gap_k.
    pub regret_slln_slope: f64,
    pub clt: Option<CltParams>,
    /// -sigma^2/sigma_0^2 when every arm shares a common reward variance.
    pub tail_exponent: Option<f64>,
}

fn validate(env: &BanditEnv, sigma: f64) -> Result<(), PredictError> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(PredictError::BadSigma(sigma));
    }
    for (k, &gap) in env.gaps.iter().enumerate() {
        if k != env.k_star && gap <= 0.0 {
            return Err(PredictError::ZeroGap(k));
        }
    }
    Ok(())
}

fn common_variance(env: &BanditEnv) -> Option<f64> {
    let v0 = env.arms[0].variance;
    env.arms
        .iter()
        .all(|a| a.variance == v0 && v0 > 0.0)
        .then_some(v0)
}

/// SLLN slopes only.
pub fn slln_limit(env: &BanditEnv, sigma: f64) -> Result<LimitPrediction, PredictError> {
    validate(env, sigma)?;
    let s2 = sigma * sigma;
    let per_arm = env
        .gaps
        .iter()
        .enumerate()
        .map(|(k, &gap)| (k != env.k_star).then(|| 2.0 * s2 / (gap * gap)))
        .collect();
    let regret = env
        .gaps
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != env.k_star)
        .map(|(_, &gap)| 2.0 * s2 / gap)
        .sum();
    Ok(LimitPrediction {
        sigma,
        per_arm_slln_slope: per_arm,
        regret_slln_slope: regret,
        clt: None,
        tail_exponent: common_variance(env).map(|v0| tail_exponent(sigma, v0.sqrt())),
    })
}

/// SLLN slopes plus CLT centering/scale at the given horizon.
///
/// A horizon below 2 is allowed but produces the degenerate all-zero
/// parameters (ln 1 = 0) with `degenerate` set.
pub fn clt_params(
    env: &BanditEnv,
    sigma: f64,
    horizon: u64,
) -> Result<LimitPrediction, PredictError> {
    let mut prediction = slln_limit(env, sigma)?;
    let log_t = (horizon.max(1) as f64).ln();
    let s2 = sigma * sigma;

    let mut per_arm_mean = Vec::with_capacity(env.arm_count());
    let mut per_arm_std = Vec::with_capacity(env.arm_count());
    let mut regret_mean = 0.0;
    let mut regret_var = 0.0;
    for (k, &gap) in env.gaps.iter().enumerate() {
        if k == env.k_star {
            per_arm_mean.push(None);
            per_arm_std.push(None);
            continue;
        }
        let gap2 = gap * gap;
        let mean = 2.0 * s2 * log_t / gap2;
        let std = (2.0 * sigma * env.arms[k].std() / gap2) * (2.0 * log_t).sqrt();
        per_arm_mean.push(Some(mean));
        per_arm_std.push(Some(std));
        regret_mean += gap * mean;
        // independence additivity: regret variance is the gap^2-weighted sum
        regret_var += gap2 * std * std;
    }
    prediction.clt = Some(CltParams {
        horizon,
        degenerate: horizon < 2,
        per_arm_mean,
        per_arm_std,
        regret_mean,
        regret_std: regret_var.sqrt(),
    });
    Ok(prediction)
}

/// The regret-tail exponent -sigma^2/sigma_0^2 for a policy designed for
/// variance sigma^2 running on rewards with common variance sigma_0^2.
pub fn tail_exponent(sigma: f64, sigma0: f64) -> f64 {
    assert!(
        sigma > 0.0 && sigma0 > 0.0,
        "tail_exponent needs positive stds"
    );
    -(sigma * sigma) / (sigma0 * sigma0)
}

/// Design sigma^2 that realizes a requested tail exponent at reward variance
/// sigma_0^2: sigma^2 = |exponent| * sigma_0^2.
pub fn design_variance_for_exponent(exponent: f64, sigma0: f64) -> f64 {
    assert!(exponent < 0.0 && sigma0 > 0.0);
    exponent.abs() * sigma0 * sigma0
}
