//! Multi-armed bandit simulation core: environments, Gaussian-tuned Thompson
//! sampling and UCB, deterministic counter-based random streams, and
//! single-trajectory simulation with play-time recording.

pub mod env;
pub mod normal;
pub mod policy;
pub mod rng;
pub mod trajectory;

pub use env::{ArmSpec, BanditEnv, EnvError, RewardKind};
pub use policy::{
    ts_select, ucb_index, ucb_select, Algorithm, PolicyConfig, PolicyError, PolicyState, TieBreak,
};
pub use rng::{CounterRng, StreamPurpose};
pub use trajectory::{
    run_trajectory, run_trajectory_observed, NoopObserver, RegretPoint, SeedSpec, SimError,
    SimOptions, StepObserver, TrajectoryRecord,
};
