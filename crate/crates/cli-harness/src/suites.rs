//! Verification suites behind `banditlab verify`.
//!
//! Each suite checks one family of theoretical claims by direct inequality
//! evaluation or Monte Carlo trend tests and returns a machine-readable
//! verdict. Scales default to the values the acceptance checks use; `reps`
//! can be dialed down for quick smoke runs.

use bandit_core::normal::normal_tail;
use bandit_core::{Algorithm, ArmSpec, BanditEnv, CounterRng, PolicyConfig, StreamPurpose};
use limit_theory::{
    geometric_max_statistic, log_sum_exp, mills_bounds, play_prob_exact, slln_limit,
};
use montecarlo::{run_campaign, CampaignConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::figures::HarnessError;

pub const SUITE_NAMES: [&str; 5] = [
    "appendix-lemmas",
    "quadrature-oracle",
    "slln-trend",
    "clt-normality",
    "independence",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Override the suite's default replication count.
    pub reps: Option<u64>,
    pub workers: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 1,
            reps: None,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub passed: bool,
    pub details: serde_json::Value,
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteOutcome, HarnessError> {
    match name {
        "appendix-lemmas" => Ok(appendix_lemmas(opts)),
        "quadrature-oracle" => Ok(quadrature_oracle(opts)),
        "slln-trend" => slln_trend(opts),
        "clt-normality" => clt_normality(opts),
        "independence" => independence(opts),
        other => Err(HarnessError::Config(format!(
            "unknown suite '{other}'; known suites: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// Normal-tail bounds on a 1e4-point grid, log-sum-exp bounds on random
/// sequences, and decay of the scaled-geometric maximum statistic.
pub fn appendix_lemmas(opts: &SuiteOptions) -> SuiteOutcome {
    let grid_points = 10_000u64;
    let mut mills_violations = 0u64;
    for i in 1..=grid_points {
        let z = 0.01 + i as f64 * (10.0 - 0.01) / grid_points as f64;
        let q = normal_tail(z);
        let (lo, hi) = mills_bounds(z);
        if !(lo < q && q <= hi) {
            mills_violations += 1;
        }
    }

    let mut rng = CounterRng::stream(opts.seed, 0, 1, StreamPurpose::Auxiliary);
    let sequences = opts.reps.unwrap_or(1000);
    let mut lse_violations = 0u64;
    for _ in 0..sequences {
        let len = 1 + (rng.next_u64() % 100) as usize;
        let values: Vec<f64> = (0..len)
            .map(|_| (rng.next_uniform() - 0.5) * 1400.0)
            .collect();
        let l = log_sum_exp(&values);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max <= l && l <= max + (len as f64).ln()) {
            lse_violations += 1;
        }
    }

    let stats: Vec<f64> = [100u64, 1000, 10_000]
        .iter()
        .map(|&n| geometric_max_statistic(n, 0.5, opts.seed))
        .collect();
    let geometric_decreasing = stats[0] > stats[1] && stats[1] > stats[2];

    SuiteOutcome {
        suite: "appendix-lemmas".into(),
        passed: mills_violations == 0 && lse_violations == 0 && geometric_decreasing,
        details: json!({
            "mills_grid_points": grid_points,
            "mills_violations": mills_violations,
            "lse_sequences": sequences,
            "lse_violations": lse_violations,
            "geometric_max_statistics": stats,
            "geometric_decreasing": geometric_decreasing,
        }),
    }
}

/// The exact play probability against a brute-force Monte Carlo expectation
/// over the optimal arm's posterior noise.
pub fn quadrature_oracle(opts: &SuiteOptions) -> SuiteOutcome {
    let draws = opts.reps.unwrap_or(1_000_000);
    let states = 20;
    let mut gen = CounterRng::stream(opts.seed, 0, 2, StreamPurpose::Auxiliary);
    let mut mc = CounterRng::stream(opts.seed, 0, 3, StreamPurpose::Auxiliary);
    let mut worst_sigmas = 0.0f64;
    let mut failures = 0u64;
    let mut rows = Vec::new();
    for _ in 0..states {
        let n_k = gen.next_u64() % 301;
        let n_star = n_k + gen.next_u64() % 1_000_000;
        let mu_hat_k = (gen.next_uniform() - 0.5) * 2.0;
        let mu_hat_star = mu_hat_k + gen.next_uniform() * 2.0 - 0.3;
        let sigma = 0.5 + 2.0 * gen.next_uniform();

        let shift = (1.0 + n_k as f64).sqrt() * (mu_hat_star - mu_hat_k) / sigma;
        let slope = ((1.0 + n_k as f64) / (1.0 + n_star as f64)).sqrt();
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..draws {
            let g = normal_tail(shift + slope * mc.next_normal());
            sum += g;
            sumsq += g * g;
        }
        let estimate = sum / draws as f64;
        let var = (sumsq / draws as f64 - estimate * estimate).max(0.0);
        let se = (var / draws as f64).sqrt();
        let quad = play_prob_exact(mu_hat_k, n_k, mu_hat_star, n_star, sigma);
        let diff = (quad - estimate).abs();
        let in_sigmas = diff / se.max(1e-15);
        worst_sigmas = worst_sigmas.max(in_sigmas);
        if diff > 3.0 * se + 1e-9 {
            failures += 1;
        }
        rows.push(json!({
            "n_k": n_k, "n_star": n_star, "quadrature": quad,
            "monte_carlo": estimate, "se": se,
        }));
    }
    SuiteOutcome {
        suite: "quadrature-oracle".into(),
        passed: failures == 0,
        details: json!({
            "states": states,
            "draws": draws,
            "failures": failures,
            "worst_deviation_in_se": worst_sigmas,
            "rows": rows,
        }),
    }
}

fn two_armed(gap: f64) -> BanditEnv {
    BanditEnv::gaussian(&[1.0, 1.0 - gap], 1.0).expect("valid env")
}

/// |avg N_2(T)/ln T - 2 sigma^2/gap^2| must shrink across a horizon ladder
/// for both algorithms and two tunings.
pub fn slln_trend(opts: &SuiteOptions) -> Result<SuiteOutcome, HarnessError> {
    let reps = opts.reps.unwrap_or(1000);
    let gap = 0.7;
    let env = two_armed(gap);
    let horizons = vec![1000u64, 10_000, 100_000];
    let mut all_pass = true;
    let mut rows = Vec::new();
    for algo in [Algorithm::Ucb, Algorithm::Ts] {
        for sigma2 in [1.0f64, 2.0] {
            let sigma = sigma2.sqrt();
            let slope = slln_limit(&env, sigma)?.per_arm_slln_slope[1].expect("suboptimal");
            let result = run_campaign(&CampaignConfig {
                env: env.clone(),
                policy: PolicyConfig::new(algo, sigma)?,
                horizons: horizons.clone(),
                replications: reps,
                master_seed: opts.seed,
                worker_count: opts.workers,
            })?;
            let devs: Vec<f64> = result
                .stats
                .per_horizon
                .iter()
                .map(|h| (h.per_arm[1].moments.mean() / (h.horizon as f64).ln() - slope).abs())
                .collect();
            let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
            all_pass &= decreasing;
            rows.push(json!({
                "algorithm": format!("{algo:?}"),
                "sigma2": sigma2,
                "slope": slope,
                "deviations": devs,
                "decreasing": decreasing,
            }));
        }
    }
    Ok(SuiteOutcome {
        suite: "slln-trend".into(),
        passed: all_pass,
        details: json!({ "replications": reps, "horizons": horizons, "rows": rows }),
    })
}

/// KS of CLT-standardized sub-optimal counts: must decrease with the horizon
/// and end at or below 0.15. The empirically-standardized path is reported
/// alongside; the pass/fail verdict uses the CLT-predicted parameters.
pub fn clt_normality(opts: &SuiteOptions) -> Result<SuiteOutcome, HarnessError> {
    let reps = opts.reps.unwrap_or(10_000);
    let env = two_armed(0.7);
    let sigma = 5.0f64.sqrt();
    let result = run_campaign(&CampaignConfig {
        env,
        policy: PolicyConfig::ucb(sigma)?,
        horizons: vec![2000, 50_000],
        replications: reps,
        master_seed: opts.seed,
        worker_count: opts.workers,
    })?;
    let ks_clt: Vec<f64> = result
        .stats
        .per_horizon
        .iter()
        .map(|h| h.per_arm[1].ks_clt.expect("defined"))
        .collect();
    let ks_empirical: Vec<f64> = result
        .stats
        .per_horizon
        .iter()
        .map(|h| h.per_arm[1].ks_empirical.expect("defined"))
        .collect();
    let decreasing = ks_clt[1] < ks_clt[0];
    let small_enough = ks_clt[1] <= 0.15;
    Ok(SuiteOutcome {
        suite: "clt-normality".into(),
        passed: decreasing && small_enough,
        details: json!({
            "replications": reps,
            "sigma2": 5.0,
            "horizons": [2000, 50_000],
            "ks_clt_standardized": ks_clt,
            "ks_empirically_standardized": ks_empirical,
            "decreasing": decreasing,
            "final_at_most_0.15": small_enough,
        }),
    })
}

/// Pairwise correlations of sub-optimal counts in a three-armed environment.
pub fn independence(opts: &SuiteOptions) -> Result<SuiteOutcome, HarnessError> {
    let reps = opts.reps.unwrap_or(10_000);
    let env = BanditEnv::new(vec![
        ArmSpec::gaussian(1.0, 1.0).expect("arm"),
        ArmSpec::gaussian(0.6, 1.0).expect("arm"),
        ArmSpec::gaussian(0.3, 1.0).expect("arm"),
    ])
    .expect("valid env");
    let mut all_pass = true;
    let mut rows = Vec::new();
    for algo in [Algorithm::Ucb, Algorithm::Ts] {
        let result = run_campaign(&CampaignConfig {
            env: env.clone(),
            policy: PolicyConfig::new(algo, 1.0)?,
            horizons: vec![50_000],
            replications: reps,
            master_seed: opts.seed,
            worker_count: opts.workers,
        })?;
        let h = &result.stats.per_horizon[0];
        let rho = h
            .correlations
            .as_ref()
            .expect("two sub-optimal arms present");
        let max_off = rho[0][1].abs();
        let ok = max_off <= 0.1;
        all_pass &= ok;
        rows.push(json!({
            "algorithm": format!("{algo:?}"),
            "correlation": rho[0][1],
            "within_0.1": ok,
        }));
    }
    Ok(SuiteOutcome {
        suite: "independence".into(),
        passed: all_pass,
        details: json!({ "replications": reps, "horizon": 50_000, "rows": rows }),
    })
}
