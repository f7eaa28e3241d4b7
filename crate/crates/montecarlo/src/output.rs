//! CSV serialization of campaign outputs.
//!
//! All files carry headers, rows are emitted in a fixed order, and floats
//! print in Rust's shortest round-trip form, so identical statistics always
//! produce identical bytes.

use crate::campaign::{RawSamples, ReplicationStats};
use crate::ratio::RatioCurve;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// Default cap on raw-sample rows written to disk.
pub const RAW_DUMP_CAP: u64 = 1_000_000;

pub fn histogram_csv(stats: &ReplicationStats) -> String {
    let mut out = String::from("horizon,arm,bin,count\n");
    for h in &stats.per_horizon {
        for (k, arm) in h.per_arm.iter().enumerate() {
            for (&bin, &count) in &arm.histogram.bins {
                writeln!(out, "{},{},{},{}", h.horizon, k, bin, count).unwrap();
            }
        }
    }
    out
}

pub fn moments_csv(stats: &ReplicationStats) -> String {
    let mut out = String::from("horizon,series,count,mean,variance,skewness,ks_clt,ks_empirical\n");
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    for h in &stats.per_horizon {
        for (k, arm) in h.per_arm.iter().enumerate() {
            writeln!(
                out,
                "{},arm_{},{},{},{},{},{},{}",
                h.horizon,
                k,
                arm.moments.count(),
                arm.moments.mean(),
                fmt_opt(arm.moments.variance()),
                fmt_opt(arm.moments.skewness()),
                fmt_opt(arm.ks_clt),
                fmt_opt(arm.ks_empirical),
            )
            .unwrap();
        }
        writeln!(
            out,
            "{},regret,{},{},{},{},,",
            h.horizon,
            h.regret.count(),
            h.regret.mean(),
            fmt_opt(h.regret.variance()),
            fmt_opt(h.regret.skewness()),
        )
        .unwrap();
    }
    out
}

pub fn correlations_csv(stats: &ReplicationStats) -> String {
    let mut out = String::from("horizon,arm_i,arm_j,correlation\n");
    for h in &stats.per_horizon {
        if let Some(rho) = &h.correlations {
            for (i, row) in rho.iter().enumerate() {
                for (j, &r) in row.iter().enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        h.horizon, h.correlation_arms[i], h.correlation_arms[j], r
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}

pub fn ratios_csv(curve: &RatioCurve) -> String {
    let mut out = String::from(
        "horizon,series,observed_mean,predicted_mean,mean_ratio,mean_ratio_se,observed_std,predicted_std,std_ratio,std_ratio_se\n",
    );
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.horizon,
            p.series,
            p.observed_mean,
            p.predicted_mean,
            p.mean_ratio,
            p.mean_ratio_se,
            p.observed_std,
            p.predicted_std,
            p.std_ratio,
            p.std_ratio_se,
        )
        .unwrap();
    }
    out
}

/// Raw per-replication counts, capped at `cap` data rows.
pub fn raw_samples_csv(raw: &RawSamples, cap: u64) -> String {
    let mut out = String::from("horizon,arm,replication,count\n");
    let mut written = 0u64;
    'outer: for (h, &horizon) in raw.horizons.iter().enumerate() {
        for (k, column) in raw.counts[h].iter().enumerate() {
            for (r, &c) in column.iter().enumerate() {
                if written == cap {
                    break 'outer;
                }
                writeln!(out, "{horizon},{k},{r},{c}").unwrap();
                written += 1;
            }
        }
    }
    out
}

/// Write the standard campaign CSV set into a directory.
pub fn write_campaign_outputs(dir: &Path, stats: &ReplicationStats) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("histogram.csv"), histogram_csv(stats))?;
    fs::write(dir.join("moments.csv"), moments_csv(stats))?;
    fs::write(dir.join("correlations.csv"), correlations_csv(stats))?;
    Ok(())
}

pub fn write_ratios(dir: &Path, curve: &RatioCurve) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("ratios.csv"), ratios_csv(curve))
}

pub fn write_raw_samples(dir: &Path, raw: &RawSamples, cap: u64) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("raw_counts.csv"), raw_samples_csv(raw, cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{run_campaign, CampaignConfig};
    use bandit_core::{BanditEnv, PolicyConfig};

    fn small_result() -> crate::campaign::CampaignResult {
        run_campaign(&CampaignConfig {
            env: BanditEnv::gaussian(&[1.0, 0.7], 1.0).unwrap(),
            policy: PolicyConfig::ucb(1.0).unwrap(),
            horizons: vec![20, 50],
            replications: 30,
            master_seed: 99,
            worker_count: None,
        })
        .unwrap()
    }

    #[test]
    fn histogram_csv_mass_conservation() {
        let result = small_result();
        let csv = histogram_csv(&result.stats);
        let mut mass_by_key = std::collections::BTreeMap::new();
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 4);
            let key = (cols[0].to_string(), cols[1].to_string());
            *mass_by_key.entry(key).or_insert(0u64) += cols[3].parse::<u64>().unwrap();
        }
        for (_, mass) in mass_by_key {
            assert_eq!(mass, 30);
        }
    }

    #[test]
    fn csv_outputs_round_trip_bytes() {
        // parsing and re-serializing must reproduce the exact bytes: floats
        // print in shortest round-trip form
        let result = small_result();
        let csv = moments_csv(&result.stats);
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            for col in &cols[3..] {
                if !col.is_empty() {
                    let v: f64 = col.parse().unwrap();
                    assert_eq!(&format!("{v}"), col);
                }
            }
        }
    }

    #[test]
    fn raw_dump_respects_cap() {
        let result = small_result();
        let capped = raw_samples_csv(&result.raw, 7);
        assert_eq!(capped.lines().count(), 8);
        let full = raw_samples_csv(&result.raw, RAW_DUMP_CAP);
        // 2 horizons x 2 arms x 30 reps
        assert_eq!(full.lines().count(), 1 + 120);
    }

    #[test]
    fn files_land_in_the_directory() {
        let result = small_result();
        let dir = std::env::temp_dir().join(format!("mc-out-{}", std::process::id()));
        write_campaign_outputs(&dir, &result.stats).unwrap();
        for name in ["histogram.csv", "moments.csv", "correlations.csv"] {
            assert!(dir.join(name).exists());
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
