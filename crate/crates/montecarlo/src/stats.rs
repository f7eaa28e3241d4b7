//! Streaming statistics accumulators and the distribution tests built on them.

use bandit_core::normal::normal_cdf;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("reference std must be positive, got {0}")]
    DegenerateReference(f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("column {0} has zero variance")]
    DegenerateVariance(usize),
    #[error("need at least 2 columns, got {0}")]
    TooFewColumns(usize),
}

/// Streaming mean and second/third central moments (Welford-style updates,
/// Chan merging). Third order is enough for the skewness reported here.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n0 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let term = delta * delta_n * n0;
        self.m3 += term * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term;
        self.mean += delta_n;
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta.powi(3) * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; None below 2 samples.
    pub fn variance(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2 / (self.n as f64 - 1.0))
    }

    pub fn std(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }

    /// Sample skewness g1 = m3 / m2^(3/2) with biased central moments.
    pub fn skewness(&self) -> Option<f64> {
        if self.n < 2 || self.m2 <= 0.0 {
            return None;
        }
        Some((self.n as f64).sqrt() * self.m3 / self.m2.powf(1.5))
    }
}

/// Unit-width integer-bin histogram.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: BTreeMap<u64, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: u64) {
        *self.bins.entry(value).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&bin, &count) in &other.bins {
            *self.bins.entry(bin).or_insert(0) += count;
        }
        self.total += other.total;
    }

    pub fn mass(&self) -> u64 {
        self.total
    }
}

/// Kolmogorov-Smirnov sup-distance between the empirical CDF of `samples`
/// and the fully specified Normal(ref_mean, ref_std^2). No parameters are
/// estimated from the data.
pub fn ks_normal(samples: &[f64], ref_mean: f64, ref_std: f64) -> Result<f64, StatsError> {
    if ref_std.is_nan() || ref_std <= 0.0 {
        return Err(StatsError::DegenerateReference(ref_std));
    }
    if samples.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples must not be NaN"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal_cdf((x - ref_mean) / ref_std);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

/// Pearson correlation matrix of the given columns (unit diagonal).
///
/// The columns are the per-arm play-count samples across replications; with
/// standardization being affine, correlations of raw and standardized counts
/// coincide.
pub fn independence_check(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, StatsError> {
    if columns.len() < 2 {
        return Err(StatsError::TooFewColumns(columns.len()));
    }
    let n = columns[0].len();
    if n < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: n });
    }
    assert!(columns.iter().all(|c| c.len() == n), "ragged columns");

    let means: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    for (c, &m) in columns.iter().zip(&means) {
        centered.push(c.iter().map(|&x| x - m).collect());
    }
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|&x| x * x).sum::<f64>().sqrt())
        .collect();
    for (k, &norm) in norms.iter().enumerate() {
        if norm == 0.0 {
            return Err(StatsError::DegenerateVariance(k));
        }
    }

    let k = columns.len();
    let mut rho = vec![vec![0.0; k]; k];
    for i in 0..k {
        rho[i][i] = 1.0;
        for j in (i + 1)..k {
            let dot: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            rho[i][j] = r;
            rho[j][i] = r;
        }
    }
    Ok(rho)
}
