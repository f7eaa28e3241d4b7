//! Acceptance suite: one test per verification criterion, each printing a
//! pass/fail line (visible with `cargo test -- --nocapture`; failures always
//! show their measured values).
//!
//! Seeds are fixed so every criterion is a deterministic computation. Two
//! distributional calibration targets (criteria 5 and 8) are currently not
//! met at desk scale; their tests state the measured values in the assertion
//! messages and docs/ledger explain the mechanism. All other criteria pass.

use bandit_core::{
    run_trajectory, Algorithm, ArmSpec, BanditEnv, PolicyConfig, SeedSpec, SimOptions,
};
use cli_harness::{cmd_histogram_figure, cmd_rerun, suites, HistogramFigureConfig, SuiteOptions};
use limit_theory::{clt_params, sandwich_check, verify_ucb_recursion};
use montecarlo::{run_campaign, CampaignConfig};
use std::time::Instant;

fn report(criterion: u32, name: &str, passed: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion:2} ({name}): {} - {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

fn two_armed(gap: f64) -> BanditEnv {
    BanditEnv::gaussian(&[1.0, 1.0 - gap], 1.0).unwrap()
}

fn record_opts() -> SimOptions {
    SimOptions {
        record_play_times: true,
        record_rewards: true,
        checkpoints: vec![],
    }
}

#[test]
fn criterion_01_appendix_inequalities() {
    let started = Instant::now();
    let outcome = suites::appendix_lemmas(&SuiteOptions {
        seed: 101,
        ..SuiteOptions::default()
    });
    let elapsed = started.elapsed();
    let detail = format!("{} in {:.2?}", outcome.details, elapsed);
    let passed = outcome.passed && elapsed.as_secs() < 5;
    report(1, "appendix inequality suite", passed, &detail);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_02_quadrature_oracle() {
    let started = Instant::now();
    let outcome = suites::quadrature_oracle(&SuiteOptions {
        seed: 102,
        ..SuiteOptions::default()
    });
    let elapsed = started.elapsed();
    let worst = &outcome.details["worst_deviation_in_se"];
    let detail = format!(
        "20 states x 1e6 draws, worst deviation {worst} se, {:.2?}",
        elapsed
    );
    let passed = outcome.passed && elapsed.as_secs() < 30;
    report(2, "quadrature vs Monte Carlo oracle", passed, &detail);
    assert!(passed, "{detail}\n{}", outcome.details);
}

#[test]
fn criterion_03_ucb_recursion_identity() {
    let started = Instant::now();
    let env = two_armed(0.5);
    let cfg = PolicyConfig::ucb(1.0).unwrap();
    let mut entries = 0usize;
    let mut mismatches = 0usize;
    for r in 0..100 {
        let traj =
            run_trajectory(&env, &cfg, 10_000, SeedSpec::new(103, r), &record_opts()).unwrap();
        let check = verify_ucb_recursion(&traj, &env, 1.0).unwrap();
        entries += check.entries.len();
        mismatches += check.mismatches();
    }
    let elapsed = started.elapsed();
    let passed = mismatches == 0 && elapsed.as_secs() < 60;
    let detail =
        format!("{entries} reconstructed play times over 100 trajectories, {mismatches} mismatches, {elapsed:.2?}");
    report(3, "UCB play-time recursion identity", passed, &detail);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_04_clt_mean_calibration() {
    let env = two_armed(0.7);
    let horizons = vec![2000u64, 10_000, 50_000];
    // frozen closed form 2 sigma^2 ln(50000) / 0.49 from a 30-digit evaluation
    let predicted_at_50k = clt_params(&env, 1.0, 50_000)
        .unwrap()
        .clt
        .unwrap()
        .per_arm_mean[1]
        .unwrap();
    assert!(
        (predicted_at_50k - 44.16236034453177).abs() < 1e-9,
        "closed-form centering drifted: {predicted_at_50k}"
    );

    let ratios = |algo: Algorithm| -> Vec<f64> {
        let result = run_campaign(&CampaignConfig {
            env: env.clone(),
            policy: PolicyConfig::new(algo, 1.0).unwrap(),
            horizons: horizons.clone(),
            replications: 10_000,
            master_seed: 12,
            worker_count: None,
        })
        .unwrap();
        result
            .stats
            .per_horizon
            .iter()
            .map(|h| {
                let pred = clt_params(&env, 1.0, h.horizon).unwrap().clt.unwrap();
                h.per_arm[1].moments.mean() / pred.per_arm_mean[1].unwrap()
            })
            .collect()
    };
    let ucb = ratios(Algorithm::Ucb);
    let ts = ratios(Algorithm::Ts);

    let ucb_in_band = (0.85..=1.15).contains(&ucb[2]);
    let ts_below_ucb = ts[2] < ucb[2];
    let ts_monotone = ts[0] < ts[1] && ts[1] < ts[2];
    let passed = ucb_in_band && ts_below_ucb && ts_monotone;
    let detail = format!(
        "UCB ratio at T=50000: {:.4} (band [0.85, 1.15]); TS ratios over T: {:.4}, {:.4}, {:.4}",
        ucb[2], ts[0], ts[1], ts[2]
    );
    report(4, "CLT mean calibration", passed, &detail);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_05_clt_normality_trend() {
    let outcome = suites::clt_normality(&SuiteOptions {
        seed: 11,
        ..SuiteOptions::default()
    })
    .unwrap();
    let ks_clt: Vec<f64> = outcome.details["ks_clt_standardized"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let ks_emp: Vec<f64> = outcome.details["ks_empirically_standardized"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let detail = format!(
        "prediction-standardized KS: {:.4} -> {:.4} (bound 0.15); empirically standardized (shape): {:.4} -> {:.4}",
        ks_clt[0], ks_clt[1], ks_emp[0], ks_emp[1]
    );
    report(5, "CLT normality trend", outcome.passed, &detail);
    assert!(
        outcome.passed,
        "KS of prediction-standardized counts stays mean-offset-dominated at desk scale: {detail}"
    );
}

#[test]
fn criterion_06_skewness_ordering() {
    let env = two_armed(0.3);
    let mut passed = true;
    let mut detail = String::new();
    for algo in [Algorithm::Ucb, Algorithm::Ts] {
        let mut skews = Vec::new();
        for sigma2 in [2.0f64, 3.0, 4.0, 5.0] {
            let result = run_campaign(&CampaignConfig {
                env: env.clone(),
                policy: PolicyConfig::new(algo, sigma2.sqrt()).unwrap(),
                horizons: vec![2000],
                replications: 10_000,
                master_seed: 13,
                worker_count: None,
            })
            .unwrap();
            skews.push(
                result.stats.per_horizon[0].per_arm[1]
                    .moments
                    .skewness()
                    .unwrap(),
            );
        }
        let decreasing = skews.windows(2).all(|w| w[1] < w[0]);
        passed &= decreasing;
        detail.push_str(&format!(
            "{algo:?} skewness by exponent -2..-5: {:.3}, {:.3}, {:.3}, {:.3}; ",
            skews[0], skews[1], skews[2], skews[3]
        ));
    }
    report(
        6,
        "skewness ordering across tail exponents",
        passed,
        &detail,
    );
    assert!(passed, "{detail}");
}

#[test]
fn criterion_07_asymptotic_independence() {
    let outcome = suites::independence(&SuiteOptions {
        seed: 16,
        ..SuiteOptions::default()
    })
    .unwrap();
    let detail = outcome.details["rows"].to_string();
    report(
        7,
        "asymptotic independence of sub-optimal counts",
        outcome.passed,
        &detail,
    );
    assert!(outcome.passed, "{detail}");
}

#[test]
fn criterion_08_coupling_sandwiches() {
    let env = two_armed(0.5);
    let cfg = PolicyConfig::ts(1.0).unwrap();
    let horizon = 100_000u64;
    let eps = 0.48 * 0.5 * 0.5; // 0.96 of the admissible sup (gap/sigma)^2/2

    let mut tilde = [0u64; 2];
    let mut hat = [0u64; 2];
    let mut epochs = [0u64; 2];
    let mut hat_epochs = [0u64; 2];
    // play-epoch-only tallies, reported for the alternate reading
    let mut play_tilde = [0u64; 2];
    let mut play_epochs = [0u64; 2];
    for r in 0..100 {
        let traj =
            run_trajectory(&env, &cfg, horizon, SeedSpec::new(15, r), &record_opts()).unwrap();
        let plays: std::collections::HashSet<u64> = traj.play_times.as_ref().unwrap()[1]
            .iter()
            .map(|&t| t - 1)
            .collect();
        let report = sandwich_check(&traj, &env, 1.0, eps).unwrap();
        for e in &report.epochs {
            let half = usize::from(e.t >= horizon / 2);
            epochs[half] += 1;
            if e.tilde_violated {
                tilde[half] += 1;
            }
            if let Some(v) = e.hat_violated {
                hat_epochs[half] += 1;
                if v {
                    hat[half] += 1;
                }
            }
            if plays.contains(&e.t) {
                play_epochs[half] += 1;
                if e.tilde_violated {
                    play_tilde[half] += 1;
                }
            }
        }
    }
    let frac = |num: u64, den: u64| num as f64 / den.max(1) as f64;
    let tilde_early = frac(tilde[0], epochs[0]);
    let tilde_late = frac(tilde[1], epochs[1]);
    let hat_early = frac(hat[0], hat_epochs[0]);
    let hat_late = frac(hat[1], hat_epochs[1]);
    let play_early = frac(play_tilde[0], play_epochs[0]);
    let play_late = frac(play_tilde[1], play_epochs[1]);

    let trend_ok = tilde_late <= tilde_early && hat_late <= hat_early;
    let small_enough = tilde_late < 0.10;
    let detail = format!(
        "tilde-sandwich violation fraction early {tilde_early:.4} -> late {tilde_late:.4} (bound 0.10); \
         hat-sandwich early {hat_early:.4} -> late {hat_late:.4}; \
         play-epochs-only tilde-sandwich early {play_early:.4} -> late {play_late:.4}; eps {eps}"
    );
    let passed = trend_ok && small_enough;
    report(8, "coupling sandwich trend and level", passed, &detail);
    assert!(
        trend_ok,
        "late-half fractions must not exceed early-half: {detail}"
    );
    assert!(
        small_enough,
        "tilde-sandwich late-half violation level misses the 10% calibration at desk scale: {detail}"
    );
}

#[test]
fn criterion_09_determinism_across_worker_counts() {
    let base = std::env::temp_dir().join(format!("acceptance-determinism-{}", std::process::id()));
    let cfg = HistogramFigureConfig {
        exponents: vec![-2.0],
        reps: 300,
        horizon: 2000,
        seed: 109,
        ..HistogramFigureConfig::defaults(Algorithm::Ucb)
    };
    let original = cmd_histogram_figure("fig1", &cfg, &base).unwrap();
    let manifest = original.run_dir.join(cli_harness::MANIFEST_FILE);
    let one = cmd_rerun(&manifest, Some(1), &base).unwrap();
    let eight = cmd_rerun(&manifest, Some(8), &base).unwrap();
    let mut passed = true;
    for file in ["histogram.csv", "moments.csv", "correlations.csv"] {
        let read =
            |dir: &std::path::Path| std::fs::read(dir.join("exponent-2").join(file)).unwrap();
        passed &= read(&original.run_dir) == read(&one.run_dir);
        passed &= read(&one.run_dir) == read(&eight.run_dir);
    }
    let detail = format!(
        "rerun from manifest with 1 and 8 workers, 3 CSV files byte-compared ({})",
        original.run_dir.display()
    );
    report(
        9,
        "byte-identical reruns across worker counts",
        passed,
        &detail,
    );
    let _ = std::fs::remove_dir_all(&base);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_10_slln_trend() {
    let outcome = suites::slln_trend(&SuiteOptions {
        seed: 14,
        ..SuiteOptions::default()
    })
    .unwrap();
    let detail = outcome.details["rows"].to_string();
    report(10, "SLLN deviation trend", outcome.passed, &detail);
    assert!(outcome.passed, "{detail}");
}

#[test]
fn trajectory_invariants_hold_under_both_policies() {
    // count conservation, play-time partition, regret recomputation on a
    // moderate run of each policy; backs the per-criterion suites above
    let env = BanditEnv::new(vec![
        ArmSpec::gaussian(1.0, 1.0).unwrap(),
        ArmSpec::uniform(0.0, 1.2).unwrap(),
        ArmSpec::shifted_exponential(2.0, -0.2).unwrap(),
    ])
    .unwrap();
    for algo in [Algorithm::Ucb, Algorithm::Ts] {
        let cfg = PolicyConfig::new(algo, 1.0).unwrap();
        let opts = SimOptions {
            record_play_times: true,
            record_rewards: true,
            checkpoints: vec![100, 500, 1000],
        };
        let traj = run_trajectory(&env, &cfg, 1000, SeedSpec::new(99, 0), &opts).unwrap();
        let total: u64 = traj.final_counts.iter().sum();
        assert_eq!(total, 1000);
        let mut all: Vec<u64> = traj
            .play_times
            .as_ref()
            .unwrap()
            .iter()
            .flatten()
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (1..=1000).collect::<Vec<_>>());
        for point in &traj.regret_checkpoints {
            let counts: Vec<u64> = traj
                .play_times
                .as_ref()
                .unwrap()
                .iter()
                .map(|ts| ts.iter().filter(|&&t| t <= point.t).count() as u64)
                .collect();
            assert!((env.regret(&counts) - point.regret).abs() < 1e-9);
        }
    }
}
