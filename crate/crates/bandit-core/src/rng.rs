//! Counter-based splittable random streams.
//!
//! Every stream is addressed by `(master_seed, replication, arm, purpose)`.
//! The i-th output of a stream is a pure function of the stream key and i, so
//! trajectories are reproducible regardless of how work is scheduled across
//! threads, and the j-th reward of an arm does not depend on when the arm was
//! played.

use crate::normal::normal_quantile;
use serde::{Deserialize, Serialize};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const MASTER_SALT: u64 = 0x5bf0_3635_dcd1_d069;

/// What a stream is consumed for. Keys for distinct purposes never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamPurpose {
    /// Reward draws for one arm; value j is the arm's (j+1)-th reward.
    Reward,
    /// Per-step posterior noise for Thompson sampling.
    TsNoise,
    /// Draws outside the simulation proper (diagnostics, test oracles).
    Auxiliary,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::Reward => 0x52,
            StreamPurpose::TsNoise => 0x54,
            StreamPurpose::Auxiliary => 0x41,
        }
    }
}

/// SplitMix64 finalizer; a bijective 64-bit mix.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A counter-mode generator: output i = mix(key + (i+1)*GAMMA).
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Stream for `(master_seed, replication, arm, purpose)`.
    pub fn stream(master_seed: u64, replication: u64, arm: u64, purpose: StreamPurpose) -> Self {
        let mut key = mix64(master_seed ^ MASTER_SALT);
        key = mix64(key.wrapping_add(GAMMA) ^ replication);
        key = mix64(key.wrapping_add(GAMMA) ^ arm);
        key = mix64(key.wrapping_add(GAMMA) ^ purpose.tag());
        CounterRng { key, counter: 0 }
    }

    /// Raw stream value at an absolute position, independent of cursor state.
    #[inline]
    pub fn value_at(&self, index: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)),
        )
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.value_at(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        // 53 random bits, offset by half a lattice step: never 0, never 1.
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw by inverse-CDF transform (one uniform consumed).
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        normal_quantile(self.next_uniform())
    }

    /// Number of values consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }
}
