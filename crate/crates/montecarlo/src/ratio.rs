//! Observed-to-predicted ratio curves against the CLT parameters.

use crate::campaign::ReplicationStats;
use limit_theory::LimitPrediction;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RatioError {
    #[error("predictions do not line up with stats horizons: {0}")]
    HorizonMismatch(String),
    #[error("prediction at horizon {0} is degenerate (zero mean or std)")]
    DegeneratePrediction(u64),
    #[error("ratios need at least 2 replications")]
    TooFewReplications,
}

/// Which sample series a ratio point describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Series {
    Arm(usize),
    Regret,
}

impl std::fmt::Display for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Series::Arm(k) => write!(f, "arm_{k}"),
            Series::Regret => write!(f, "regret"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub horizon: u64,
    pub series: Series,
    pub observed_mean: f64,
    pub predicted_mean: f64,
    pub mean_ratio: f64,
    /// Monte Carlo standard error of the mean ratio.
    pub mean_ratio_se: f64,
    pub observed_std: f64,
    pub predicted_std: f64,
    pub std_ratio: f64,
    /// Normal-theory standard error of the std ratio, s / sqrt(2(n-1)).
    pub std_ratio_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCurve {
    pub points: Vec<RatioPoint>,
}

impl RatioCurve {
    pub fn series(&self, series: Series) -> Vec<&RatioPoint> {
        self.points.iter().filter(|p| p.series == series).collect()
    }
}

/// Ratios of observed to CLT-predicted mean and std for regret and each
/// sub-optimal arm, one prediction per stats horizon (from `clt_params` with
/// the campaign's sigma and the env's arm variances).
pub fn ratio_curve(
    stats: &ReplicationStats,
    predictions: &[LimitPrediction],
) -> Result<RatioCurve, RatioError> {
    if stats.replications < 2 {
        return Err(RatioError::TooFewReplications);
    }
    if predictions.len() != stats.per_horizon.len() {
        return Err(RatioError::HorizonMismatch(format!(
            "{} predictions for {} horizons",
            predictions.len(),
            stats.per_horizon.len()
        )));
    }

    let mut points = Vec::new();
    for (h, prediction) in stats.per_horizon.iter().zip(predictions) {
        let clt = prediction
            .clt
            .as_ref()
            .ok_or_else(|| RatioError::HorizonMismatch("prediction lacks CLT fields".into()))?;
        if clt.horizon != h.horizon {
            return Err(RatioError::HorizonMismatch(format!(
                "prediction horizon {} vs stats horizon {}",
                clt.horizon, h.horizon
            )));
        }
        if clt.degenerate || clt.regret_mean <= 0.0 || clt.regret_std <= 0.0 {
            return Err(RatioError::DegeneratePrediction(h.horizon));
        }
        let n = stats.replications as f64;

        let mut push = |series: Series, moments: &crate::stats::Moments, pm: f64, ps: f64| {
            let observed_mean = moments.mean();
            let observed_std = moments.std().unwrap_or(0.0);
            points.push(RatioPoint {
                horizon: h.horizon,
                series,
                observed_mean,
                predicted_mean: pm,
                mean_ratio: observed_mean / pm,
                mean_ratio_se: observed_std / n.sqrt() / pm,
                observed_std,
                predicted_std: ps,
                std_ratio: observed_std / ps,
                std_ratio_se: observed_std / (2.0 * (n - 1.0)).sqrt() / ps,
            });
        };

        push(Series::Regret, &h.regret, clt.regret_mean, clt.regret_std);
        for (k, arm) in h.per_arm.iter().enumerate() {
            if let (Some(pm), Some(ps)) = (clt.per_arm_mean[k], clt.per_arm_std[k]) {
                if pm > 0.0 && ps > 0.0 {
                    push(Series::Arm(k), &arm.moments, pm, ps);
                }
            }
        }
    }
    Ok(RatioCurve { points })
}
