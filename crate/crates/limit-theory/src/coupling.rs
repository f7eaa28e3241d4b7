//! Coupling approximations to the Thompson-sampling play probability and the
//! sandwich diagnostics built on them.
//!
//! For a sub-optimal arm with gap delta (in design-sigma units) and j plays:
//!
//! * p_tilde(j)       = exp(-j delta^2 / 2)
//! * p_tilde_plus(j)  = exp(-j (delta^2/2 + eps))
//! * p_tilde_minus(j) = min(1, 2 exp(-j (delta^2/2 - eps)))   (0 < eps < delta^2/2)
//! * p_hat(j)         = min(1, (pi j g^2)^(-1/2) exp(-j g^2 / 2)),  g = mu_star - mu_hat_k(j)
//! * p_hat_plus(j)    = p_hat(j) / 5
//!
//! The sandwich check replays a recorded trajectory and tests, at every
//! decision epoch, whether the exact conditional play probability falls
//! strictly inside (p_tilde_plus, p_tilde_minus) and (p_hat_plus, p_hat).
//! Both are eventual guarantees, so violations are reported as fractions
//! against a burn-in threshold rather than asserted pointwise.

use crate::quadrature::play_prob_exact;
use bandit_core::{Algorithm, BanditEnv, TrajectoryRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CouplingError {
    #[error("eps {eps} must lie in (0, {limit}) for this gap")]
    EpsOutOfRange { eps: f64, limit: f64 },
    #[error("mu_star equals mu_hat; the approximation divides by zero")]
    DegenerateGap,
    #[error("p_hat needs a positive play index")]
    ZeroIndex,
    #[error("first passage with zero success probability never terminates")]
    ZeroProbability,
    #[error("uniform stream ended before the first passage")]
    StreamExhausted,
    #[error("diagnostic requires a two-armed environment, got {0} arms")]
    NotTwoArmed(usize),
    #[error("diagnostic requires a Thompson-sampling trajectory")]
    NotThompson,
    #[error("trajectory record is missing {0}")]
    MissingRecord(&'static str),
    #[error("trajectory record is inconsistent with the environment: {0}")]
    RecordMismatch(String),
}

/// SLLN-level approximation exp(-j delta^2 / 2).
pub fn p_tilde(j: u64, delta: f64) -> f64 {
    (-(j as f64) * delta * delta / 2.0).exp()
}

fn check_eps(delta: f64, eps: f64) -> Result<(), CouplingError> {
    let limit = delta * delta / 2.0;
    if !(eps > 0.0 && eps < limit) {
        return Err(CouplingError::EpsOutOfRange { eps, limit });
    }
    Ok(())
}

/// Lower sandwich bound exp(-j (delta^2/2 + eps)).
pub fn p_tilde_plus(j: u64, delta: f64, eps: f64) -> Result<f64, CouplingError> {
    check_eps(delta, eps)?;
    Ok((-(j as f64) * (delta * delta / 2.0 + eps)).exp())
}

/// Upper sandwich bound min(1, 2 exp(-j (delta^2/2 - eps))).
pub fn p_tilde_minus(j: u64, delta: f64, eps: f64) -> Result<f64, CouplingError> {
    check_eps(delta, eps)?;
    Ok((2.0 * (-(j as f64) * (delta * delta / 2.0 - eps)).exp()).min(1.0))
}

fn p_hat_from_gap(j: u64, gap: f64) -> Result<f64, CouplingError> {
    if j == 0 {
        return Err(CouplingError::ZeroIndex);
    }
    if gap == 0.0 {
        return Err(CouplingError::DegenerateGap);
    }
    let jg2 = j as f64 * gap * gap;
    let value = (std::f64::consts::PI * jg2).sqrt().recip() * (-jg2 / 2.0).exp();
    Ok(value.min(1.0))
}

/// CLT-level approximation min(1, (pi j (mu_star - mu_hat)^2)^(-1/2) exp(-j (mu_star - mu_hat)^2 / 2)).
pub fn p_hat(j: u64, mu_star: f64, mu_hat_k_j: f64) -> Result<f64, CouplingError> {
    p_hat_from_gap(j, mu_star - mu_hat_k_j)
}

/// Exactly p_hat / 5.
pub fn p_hat_plus(j: u64, mu_star: f64, mu_hat_k_j: f64) -> Result<f64, CouplingError> {
    Ok(p_hat(j, mu_star, mu_hat_k_j)? / 5.0)
}

/// Smallest i >= 1 with uniform_i < p; geometric(p) under iid uniforms.
///
/// Monotone coupling: on the same stream, a smaller p never returns earlier.
pub fn tau_first_passage<I>(p: f64, uniforms: I) -> Result<u64, CouplingError>
where
    I: IntoIterator<Item = f64>,
{
    if p.is_nan() || p <= 0.0 {
        return Err(CouplingError::ZeroProbability);
    }
    for (i, u) in uniforms.into_iter().enumerate() {
        if u < p {
            return Ok(i as u64 + 1);
        }
    }
    Err(CouplingError::StreamExhausted)
}

/// One decision epoch of a [`CouplingReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEpoch {
    /// State time t; the probabilities refer to the decision at t+1.
    pub t: u64,
    /// Plays of the sub-optimal arm at time t.
    pub j: u64,
    pub p_exact: f64,
    pub p_tilde_plus: f64,
    pub p_tilde_minus: f64,
    /// None when the epoch is skipped (j = 0 or degenerate gap).
    pub p_hat: Option<f64>,
    pub p_hat_plus: Option<f64>,
    pub tilde_violated: bool,
    pub hat_violated: Option<bool>,
}

impl CouplingEpoch {
    pub fn skipped(&self) -> bool {
        self.p_hat.is_none()
    }
}

/// Violation fractions over a range of epochs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationFractions {
    pub epochs: u64,
    pub tilde_sandwich: f64,
    /// Fraction among non-skipped epochs.
    pub hat_sandwich: f64,
}

/// Per-epoch sandwich diagnostics for one two-armed TS trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub suboptimal_arm: usize,
    pub horizon: u64,
    pub sigma: f64,
    pub eps: f64,
    /// Gap of the sub-optimal arm in design-sigma units.
    pub scaled_delta: f64,
    pub epochs: Vec<CouplingEpoch>,
}

impl CouplingReport {
    /// Fractions over epochs with t >= burn_in.
    pub fn violation_fractions(&self, burn_in: u64) -> ViolationFractions {
        let mut total = 0u64;
        let mut tilde = 0u64;
        let mut hat_total = 0u64;
        let mut hat = 0u64;
        for e in self.epochs.iter().filter(|e| e.t >= burn_in) {
            total += 1;
            if e.tilde_violated {
                tilde += 1;
            }
            if let Some(v) = e.hat_violated {
                hat_total += 1;
                if v {
                    hat += 1;
                }
            }
        }
        ViolationFractions {
            epochs: total,
            tilde_sandwich: if total == 0 {
                0.0
            } else {
                tilde as f64 / total as f64
            },
            hat_sandwich: if hat_total == 0 {
                0.0
            } else {
                hat as f64 / hat_total as f64
            },
        }
    }

    /// (first half, second half) fractions split at horizon/2.
    pub fn half_fractions(&self) -> (ViolationFractions, ViolationFractions) {
        let mid = self.horizon / 2;
        let mut early = self.clone();
        early.epochs.retain(|e| e.t < mid);
        (early.violation_fractions(0), self.violation_fractions(mid))
    }

    pub fn csv_header() -> &'static str {
        "t,j,p_exact,p_tilde_plus,p_tilde_minus,p_hat,p_hat_plus,tilde_violated,hat_violated,skipped"
    }

    pub fn csv_row(e: &CouplingEpoch) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        let optb = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            e.t,
            e.j,
            e.p_exact,
            e.p_tilde_plus,
            e.p_tilde_minus,
            opt(e.p_hat),
            opt(e.p_hat_plus),
            e.tilde_violated,
            optb(e.hat_violated),
            e.skipped()
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for e in &self.epochs {
            out.push_str(&Self::csv_row(e));
            out.push('\n');
        }
        out
    }

    /// Configuration echo for the JSON sidecar.
    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "suboptimal_arm": self.suboptimal_arm,
            "horizon": self.horizon,
            "sigma": self.sigma,
            "eps": self.eps,
            "scaled_delta": self.scaled_delta,
            "epochs": self.epochs.len(),
        })
        .to_string()
    }
}

/// Replay of a recorded trajectory from its play times and rewards.
pub(crate) struct RecordReplay {
    /// arm played at time t (1-indexed via t-1).
    pub arm_at: Vec<usize>,
    /// reward received at time t.
    pub reward_at: Vec<f64>,
}

impl RecordReplay {
    pub fn new(traj: &TrajectoryRecord) -> Result<Self, CouplingError> {
        let play_times = traj
            .play_times
            .as_ref()
            .ok_or(CouplingError::MissingRecord("play_times"))?;
        let rewards = traj
            .rewards
            .as_ref()
            .ok_or(CouplingError::MissingRecord("rewards"))?;
        let horizon = traj.horizon as usize;
        let mut arm_at = vec![usize::MAX; horizon];
        let mut reward_at = vec![0.0; horizon];
        for (arm, times) in play_times.iter().enumerate() {
            if times.len() != rewards[arm].len() {
                return Err(CouplingError::RecordMismatch(format!(
                    "arm {arm}: {} play times but {} rewards",
                    times.len(),
                    rewards[arm].len()
                )));
            }
            for (&t, &x) in times.iter().zip(&rewards[arm]) {
                if t < 1 || t as usize > horizon || arm_at[t as usize - 1] != usize::MAX {
                    return Err(CouplingError::RecordMismatch(format!(
                        "play time {t} of arm {arm} is out of range or duplicated"
                    )));
                }
                arm_at[t as usize - 1] = arm;
                reward_at[t as usize - 1] = x;
            }
        }
        if arm_at.contains(&usize::MAX) {
            return Err(CouplingError::RecordMismatch(
                "play times do not partition 1..=horizon".into(),
            ));
        }
        Ok(RecordReplay { arm_at, reward_at })
    }
}

/// Evaluate the tilde- and hat-level sandwiches at every decision epoch of a
/// recorded two-armed TS trajectory.
///
/// `eps` lives in design-sigma units: it must fall in (0, (delta/sigma)^2/2).
/// Epochs where p_hat is undefined (no plays yet, or the shrunk mean exactly
/// equals the optimal mean) are kept but flagged skipped.
pub fn sandwich_check(
    traj: &TrajectoryRecord,
    env: &BanditEnv,
    sigma: f64,
    eps: f64,
) -> Result<CouplingReport, CouplingError> {
    if env.arm_count() != 2 {
        return Err(CouplingError::NotTwoArmed(env.arm_count()));
    }
    if traj.policy.algorithm != Algorithm::Ts {
        return Err(CouplingError::NotThompson);
    }
    let sub = if env.k_star == 0 { 1 } else { 0 };
    let scaled_delta = env.gaps[sub] / sigma;
    check_eps(scaled_delta, eps)?;
    let replay = RecordReplay::new(traj)?;

    let mu_star_true = env.arms[env.k_star].mean;
    let mut counts = [0u64; 2];
    let mut sums = [0.0f64; 2];
    let mut epochs = Vec::with_capacity(traj.horizon as usize);

    for t in 0..traj.horizon {
        let j = counts[sub];
        let n_star = counts[env.k_star];
        let shrunk_sub = sums[sub] / (1.0 + j as f64);
        let shrunk_star = sums[env.k_star] / (1.0 + n_star as f64);
        let p_exact = play_prob_exact(shrunk_sub, j, shrunk_star, n_star, sigma);
        let ptp = p_tilde_plus(j, scaled_delta, eps)?;
        let ptm = p_tilde_minus(j, scaled_delta, eps)?;
        let tilde_violated = !(ptp < p_exact && p_exact < ptm);

        let scaled_gap = (mu_star_true - shrunk_sub) / sigma;
        let (ph, php, hat_violated) = match p_hat_from_gap(j, scaled_gap) {
            Ok(ph) => {
                let php = ph / 5.0;
                (Some(ph), Some(php), Some(!(php < p_exact && p_exact < ph)))
            }
            Err(_) => (None, None, None),
        };

        epochs.push(CouplingEpoch {
            t,
            j,
            p_exact,
            p_tilde_plus: ptp,
            p_tilde_minus: ptm,
            p_hat: ph,
            p_hat_plus: php,
            tilde_violated,
            hat_violated,
        });

        let arm = replay.arm_at[t as usize];
        counts[arm] += 1;
        sums[arm] += replay.reward_at[t as usize];
    }

    if counts[0] != traj.final_counts[0] || counts[1] != traj.final_counts[1] {
        return Err(CouplingError::RecordMismatch(
            "replayed counts differ from recorded final counts".into(),
        ));
    }

    Ok(CouplingReport {
        suboptimal_arm: sub,
        horizon: traj.horizon,
        sigma,
        eps,
        scaled_delta,
        epochs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bandit_core::{run_trajectory, PolicyConfig, SeedSpec, SimOptions};

    fn record_opts() -> SimOptions {
        SimOptions {
            record_play_times: true,
            record_rewards: true,
            checkpoints: vec![],
        }
    }

    #[test]
    fn p_tilde_reference_values() {
        assert_eq!(p_tilde(0, 0.7), 1.0);
        assert!((p_tilde(1, 2.0) - 0.1353352832366127).abs() < 1e-15);
    }

    #[test]
    fn p_tilde_family_is_strictly_ordered() {
        // frozen closed forms at j=10, delta=1, eps=0.1
        let plus = p_tilde_plus(10, 1.0, 0.1).unwrap();
        let mid = p_tilde(10, 1.0);
        let minus = p_tilde_minus(10, 1.0, 0.1).unwrap();
        assert!((plus - 0.0024787521766663585).abs() < 1e-17);
        assert!((mid - 0.006737946999085467).abs() < 1e-17);
        assert!((minus - 0.03663127777746836).abs() < 1e-16);
        assert!(plus < mid && mid < minus);
    }

    #[test]
    fn p_tilde_minus_clamps_to_one() {
        assert_eq!(p_tilde_minus(0, 1.0, 0.1).unwrap(), 1.0);
        assert_eq!(p_tilde_minus(1, 0.5, 0.12).unwrap(), 1.0);
    }

    #[test]
    fn eps_range_is_enforced() {
        assert!(matches!(
            p_tilde_plus(3, 1.0, 0.5),
            Err(CouplingError::EpsOutOfRange { .. })
        ));
        assert!(matches!(
            p_tilde_minus(3, 1.0, 0.0),
            Err(CouplingError::EpsOutOfRange { .. })
        ));
    }

    #[test]
    fn p_hat_reference_value() {
        // frozen from a 30-digit evaluation of (pi*4)^(-1/2) e^{-2}
        let v = p_hat(4, 1.0, 0.0).unwrap();
        assert!((v - 0.03817737854429108).abs() < 1e-15);
        let plus = p_hat_plus(4, 1.0, 0.0).unwrap();
        assert_eq!(plus, v / 5.0);
    }

    #[test]
    fn p_hat_degenerate_gap() {
        assert_eq!(p_hat(4, 0.5, 0.5), Err(CouplingError::DegenerateGap));
        assert_eq!(p_hat(0, 1.0, 0.0), Err(CouplingError::ZeroIndex));
    }

    #[test]
    fn p_hat_clamps_to_one() {
        // tiny j * gap^2 makes the prefactor blow up
        assert_eq!(p_hat(1, 1e-4, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn tau_direct_definition() {
        assert_eq!(tau_first_passage(1.0, [0.99, 0.5]).unwrap(), 1);
        assert_eq!(tau_first_passage(0.5, [0.7, 0.3, 0.9]).unwrap(), 2);
        assert_eq!(
            tau_first_passage(0.0, [0.7]).unwrap_err(),
            CouplingError::ZeroProbability
        );
        assert_eq!(
            tau_first_passage(1e-9, [0.7, 0.8]).unwrap_err(),
            CouplingError::StreamExhausted
        );
    }

    #[test]
    fn tau_geometric_mean_oracle() {
        use bandit_core::{CounterRng, StreamPurpose};
        let mut rng = CounterRng::stream(99, 0, 0, StreamPurpose::Auxiliary);
        let p = 0.01;
        let n = 1_000_000u64;
        let mut total = 0u64;
        for _ in 0..n {
            total += tau_first_passage(p, std::iter::from_fn(|| Some(rng.next_uniform()))).unwrap();
        }
        let mean = total as f64 / n as f64;
        let se = ((1.0 - p) / (p * p) / n as f64).sqrt();
        assert!((mean - 100.0).abs() < 3.0 * se, "mean={mean} se={se}");
    }

    #[test]
    fn sandwich_requires_two_armed_ts() {
        let env3 = BanditEnv::gaussian(&[1.0, 0.6, 0.3], 1.0).unwrap();
        let env2 = BanditEnv::gaussian(&[1.0, 0.5], 1.0).unwrap();
        let ts = PolicyConfig::ts(1.0).unwrap();
        let ucb = PolicyConfig::ucb(1.0).unwrap();
        let traj3 = run_trajectory(&env3, &ts, 50, SeedSpec::new(1, 0), &record_opts()).unwrap();
        assert_eq!(
            sandwich_check(&traj3, &env3, 1.0, 0.05).unwrap_err(),
            CouplingError::NotTwoArmed(3)
        );
        let traj_ucb =
            run_trajectory(&env2, &ucb, 50, SeedSpec::new(1, 0), &record_opts()).unwrap();
        assert_eq!(
            sandwich_check(&traj_ucb, &env2, 1.0, 0.05).unwrap_err(),
            CouplingError::NotThompson
        );
        let traj = run_trajectory(&env2, &ts, 50, SeedSpec::new(1, 0), &record_opts()).unwrap();
        assert!(matches!(
            sandwich_check(&traj, &env2, 1.0, 0.2),
            Err(CouplingError::EpsOutOfRange { .. })
        ));
        let mut no_rewards = traj.clone();
        no_rewards.rewards = None;
        assert_eq!(
            sandwich_check(&no_rewards, &env2, 1.0, 0.05).unwrap_err(),
            CouplingError::MissingRecord("rewards")
        );
    }

    #[test]
    fn sandwich_bookkeeping_is_consistent() {
        let env = BanditEnv::gaussian(&[1.0, 0.5], 1.0).unwrap();
        let ts = PolicyConfig::ts(1.0).unwrap();
        let traj = run_trajectory(&env, &ts, 2000, SeedSpec::new(17, 3), &record_opts()).unwrap();
        let report = sandwich_check(&traj, &env, 1.0, 0.06).unwrap();
        assert_eq!(report.epochs.len(), 2000);
        assert_eq!(report.suboptimal_arm, 1);
        for e in &report.epochs {
            assert!((0.0..=1.0).contains(&e.p_exact));
            assert!((0.0..=1.0).contains(&e.p_tilde_plus));
            assert!((0.0..=1.0).contains(&e.p_tilde_minus));
            if let (Some(ph), Some(php)) = (e.p_hat, e.p_hat_plus) {
                assert!((0.0..=1.0).contains(&ph));
                assert_eq!(php, ph / 5.0);
            } else {
                assert!(e.skipped());
            }
        }
        // epoch 0 has j = 0: the tilde lower bound is 1, so it must violate
        assert!(report.epochs[0].tilde_violated);
        let fr = report.violation_fractions(0);
        assert!(fr.tilde_sandwich > 0.0 && fr.tilde_sandwich <= 1.0);
        let (early, late) = report.half_fractions();
        assert_eq!(early.epochs + late.epochs, 2000);
    }

    #[test]
    fn sandwich_violations_decay_on_a_long_run() {
        let env = BanditEnv::gaussian(&[1.0, 0.5], 1.0).unwrap();
        let ts = PolicyConfig::ts(1.0).unwrap();
        let traj = run_trajectory(&env, &ts, 20_000, SeedSpec::new(5, 11), &record_opts()).unwrap();
        let report = sandwich_check(&traj, &env, 1.0, 0.12).unwrap();
        let (early, late) = report.half_fractions();
        assert!(
            late.tilde_sandwich <= early.tilde_sandwich,
            "tilde early={} late={}",
            early.tilde_sandwich,
            late.tilde_sandwich
        );
        assert!(
            late.hat_sandwich <= early.hat_sandwich,
            "hat early={} late={}",
            early.hat_sandwich,
            late.hat_sandwich
        );
    }

    proptest::proptest! {
        #[test]
        fn tilde_family_ordering_on_a_grid(
            j in 1u64..200,
            delta in 0.05f64..3.0,
            eps_frac in 0.01f64..0.99,
        ) {
            let eps = eps_frac * delta * delta / 2.0;
            // keep the exponents representable; exp(-746) underflows to zero
            proptest::prop_assume!(j as f64 * (delta * delta / 2.0 + eps) < 700.0);
            let plus = p_tilde_plus(j, delta, eps).unwrap();
            let mid = p_tilde(j, delta);
            let minus = p_tilde_minus(j, delta, eps).unwrap();
            proptest::prop_assert!(plus < mid && mid < minus);
        }

        #[test]
        fn tau_monotone_coupling(
            seed in 0u64..1000,
            p_small in 0.01f64..0.5,
            extra in 0.0f64..0.49,
        ) {
            use bandit_core::{CounterRng, StreamPurpose};
            let p_large = p_small + extra;
            let stream = |s: u64| {
                let mut rng = CounterRng::stream(s, 0, 7, StreamPurpose::Auxiliary);
                std::iter::from_fn(move || Some(rng.next_uniform()))
            };
            let tau_small = tau_first_passage(p_small, stream(seed)).unwrap();
            let tau_large = tau_first_passage(p_large, stream(seed)).unwrap();
            proptest::prop_assert!(tau_small >= tau_large);
        }
    }

    #[test]
    fn coupling_csv_round_trip_shape() {
        let env = BanditEnv::gaussian(&[1.0, 0.5], 1.0).unwrap();
        let ts = PolicyConfig::ts(1.0).unwrap();
        let traj = run_trajectory(&env, &ts, 100, SeedSpec::new(2, 0), &record_opts()).unwrap();
        let report = sandwich_check(&traj, &env, 1.0, 0.06).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 101);
        assert_eq!(lines[0], CouplingReport::csv_header());
        assert_eq!(lines[1].split(',').count(), 10);
        let sidecar: serde_json::Value = serde_json::from_str(&report.sidecar_json()).unwrap();
        assert_eq!(sidecar["horizon"], 100);
    }
}
