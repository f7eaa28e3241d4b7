//! Single-trajectory simulation with full play-time recording.
//!
//! One trajectory is a pure function of `(env, config, horizon, seed)`. UCB
//! plays each arm once in index order during steps 1..K (the index is
//! undefined at zero plays); Thompson sampling needs no initialization.
//! Rewards come from the per-(replication, arm) reward stream, so the j-th
//! reward of an arm is fixed by the seed alone, and TS noise comes from the
//! per-(replication, arm) noise stream, one draw per arm per step.

use crate::env::BanditEnv;
use crate::policy::{ts_select, ucb_select, Algorithm, PolicyConfig, PolicyState};
use crate::rng::{CounterRng, StreamPurpose};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("horizon {horizon} is shorter than the minimum {minimum} for this configuration")]
    HorizonTooShort { horizon: u64, minimum: u64 },
    #[error("policy failure during simulation: {0}")]
    Policy(#[from] crate::policy::PolicyError),
}

/// Addresses the random streams of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replication: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, replication: u64) -> Self {
        SeedSpec {
            master_seed,
            replication,
        }
    }

    pub fn reward_stream(&self, arm: usize) -> CounterRng {
        CounterRng::stream(
            self.master_seed,
            self.replication,
            arm as u64,
            StreamPurpose::Reward,
        )
    }

    pub fn ts_noise_stream(&self, arm: usize) -> CounterRng {
        CounterRng::stream(
            self.master_seed,
            self.replication,
            arm as u64,
            StreamPurpose::TsNoise,
        )
    }
}

/// What to keep beyond final counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub record_play_times: bool,
    pub record_rewards: bool,
    /// Times at which (t, R(t)) is recorded; out-of-range entries are ignored.
    pub checkpoints: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretPoint {
    pub t: u64,
    pub regret: f64,
}

/// Everything observable about one finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub horizon: u64,
    pub policy: PolicyConfig,
    pub seed: SeedSpec,
    pub final_counts: Vec<u64>,
    pub final_regret: f64,
    /// Per arm, the times of its 1st, 2nd, ... plays (strictly increasing).
    pub play_times: Option<Vec<Vec<u64>>>,
    /// Per arm, the rewards of its 1st, 2nd, ... plays.
    pub rewards: Option<Vec<Vec<f64>>>,
    pub regret_checkpoints: Vec<RegretPoint>,
}

impl TrajectoryRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Header for [`TrajectoryRecord::csv_row`].
    pub fn csv_header(arm_count: usize) -> String {
        let mut cols = vec!["horizon".to_string()];
        cols.extend((0..arm_count).map(|k| format!("count_{k}")));
        cols.push("regret".to_string());
        cols.push("master_seed".to_string());
        cols.push("replication".to_string());
        cols.join(",")
    }

    /// Compact row: horizon, per-arm counts, final regret, seed.
    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.horizon.to_string()];
        cols.extend(self.final_counts.iter().map(|c| c.to_string()));
        cols.push(format!("{}", self.final_regret));
        cols.push(self.seed.master_seed.to_string());
        cols.push(self.seed.replication.to_string());
        cols.join(",")
    }
}

/// Hook into the simulation loop; used by diagnostics and campaign capture.
pub trait StepObserver {
    /// Called before the decision that produces step `state.t + 1`.
    fn before_decision(&mut self, _state: &PolicyState) {}
    /// Called after the step: `state.t` is the just-finished time.
    fn after_step(&mut self, _state: &PolicyState, _arm: usize, _reward: f64) {}
}

/// Observer that does nothing.
pub struct NoopObserver;

impl StepObserver for NoopObserver {}

pub fn run_trajectory(
    env: &BanditEnv,
    config: &PolicyConfig,
    horizon: u64,
    seed: SeedSpec,
    opts: &SimOptions,
) -> Result<TrajectoryRecord, SimError> {
    run_trajectory_observed(env, config, horizon, seed, opts, &mut NoopObserver)
}

pub fn run_trajectory_observed<O: StepObserver>(
    env: &BanditEnv,
    config: &PolicyConfig,
    horizon: u64,
    seed: SeedSpec,
    opts: &SimOptions,
    observer: &mut O,
) -> Result<TrajectoryRecord, SimError> {
    let arm_count = env.arm_count();
    let minimum = match config.algorithm {
        Algorithm::Ucb => arm_count as u64,
        Algorithm::Ts => 1,
    };
    if horizon < minimum {
        return Err(SimError::HorizonTooShort { horizon, minimum });
    }

    let mut state = PolicyState::new(arm_count);
    let mut reward_streams: Vec<CounterRng> =
        (0..arm_count).map(|k| seed.reward_stream(k)).collect();
    let mut noise_streams: Vec<CounterRng> = match config.algorithm {
        Algorithm::Ts => (0..arm_count).map(|k| seed.ts_noise_stream(k)).collect(),
        Algorithm::Ucb => Vec::new(),
    };
    let mut noise = vec![0.0; arm_count];

    let mut play_times: Vec<Vec<u64>> = vec![Vec::new(); arm_count];
    let mut rewards: Vec<Vec<f64>> = vec![Vec::new(); arm_count];
    let mut checkpoints: Vec<u64> = opts
        .checkpoints
        .iter()
        .copied()
        .filter(|&t| t >= 1 && t <= horizon)
        .collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let mut next_checkpoint = 0usize;
    let mut regret_checkpoints = Vec::with_capacity(checkpoints.len());

    for t_next in 1..=horizon {
        observer.before_decision(&state);
        let arm = match config.algorithm {
            Algorithm::Ucb if state.t < arm_count as u64 => state.t as usize,
            Algorithm::Ucb => ucb_select(&state, config)?,
            Algorithm::Ts => {
                for (k, stream) in noise_streams.iter_mut().enumerate() {
                    noise[k] = stream.next_normal();
                }
                ts_select(&state, config, &noise)
            }
        };
        let reward = env.arms[arm].sample(reward_streams[arm].next_uniform());
        state.record_play(arm, reward);
        if opts.record_play_times {
            play_times[arm].push(t_next);
        }
        if opts.record_rewards {
            rewards[arm].push(reward);
        }
        if next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] == t_next {
            regret_checkpoints.push(RegretPoint {
                t: t_next,
                regret: env.regret(&state.counts),
            });
            next_checkpoint += 1;
        }
        observer.after_step(&state, arm, reward);
    }

    let final_regret = env.regret(&state.counts);
    Ok(TrajectoryRecord {
        horizon,
        policy: *config,
        seed,
        final_counts: state.counts,
        final_regret,
        play_times: opts.record_play_times.then_some(play_times),
        rewards: opts.record_rewards.then_some(rewards),
        regret_checkpoints,
    })
}
