//! Deterministic parallel Monte Carlo replication engine and
//! cross-replication statistics for bandit campaigns.

pub mod campaign;
pub mod output;
pub mod ratio;
pub mod stats;

pub use campaign::{
    aggregate, run_campaign, run_replication, ArmStats, CampaignConfig, CampaignError,
    CampaignResult, HorizonStats, RawSamples, RepSnapshot, ReplicationStats,
};
pub use output::{
    correlations_csv, histogram_csv, moments_csv, ratios_csv, raw_samples_csv,
    write_campaign_outputs, write_ratios, write_raw_samples, RAW_DUMP_CAP,
};
pub use ratio::{ratio_curve, RatioCurve, RatioError, RatioPoint, Series};
pub use stats::{independence_check, ks_normal, Histogram, Moments, StatsError};
