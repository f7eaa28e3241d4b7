//! End-to-end checks of the banditlab binary: exit-code contract and the
//! on-disk shape of a run directory.

use std::path::PathBuf;
use std::process::Command;

fn banditlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_banditlab"))
}

fn temp_out(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("banditlab-cli-{tag}-{}", std::process::id()))
}

#[test]
fn exit_zero_on_passing_verification() {
    let out = temp_out("ok");
    let status = banditlab()
        .args(["verify", "--suites", "appendix-lemmas", "--seed", "4"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn exit_one_on_failing_verification() {
    // clt-normality misses its calibration target; tiny reps keep it fast
    let out = temp_out("fail");
    let output = banditlab()
        .args([
            "verify",
            "--suites",
            "clt-normality",
            "--reps",
            "100",
            "--seed",
            "4",
        ])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    // the verdicts file still lands, with the failure recorded
    let run_dir = std::fs::read_dir(&out)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let verdicts: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("verdicts.json")).unwrap())
            .unwrap();
    assert_eq!(verdicts[0]["passed"], false);
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn exit_two_on_usage_errors() {
    let out = temp_out("usage");
    let unknown_suite = banditlab()
        .args(["verify", "--suites", "nonsense"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(unknown_suite.code(), Some(2));

    let three_arms = banditlab()
        .args(["coupling", "--means", "1.0,0.5,0.2", "--horizon", "50"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(three_arms.code(), Some(2));

    let bad_flag = banditlab()
        .args(["fig1", "--no-such-flag"])
        .status()
        .unwrap();
    assert_eq!(bad_flag.code(), Some(2));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn fig1_run_directory_shape() {
    let out = temp_out("fig1");
    let status = banditlab()
        .args([
            "fig1",
            "--reps",
            "30",
            "--horizon",
            "200",
            "--seed",
            "9",
            "--exponents",
            "-2,-5",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let run_dir = std::fs::read_dir(&out)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    assert!(run_dir.join("manifest.json").exists());
    for sub in ["exponent-2", "exponent-5"] {
        for file in ["histogram.csv", "histogram.svg", "moments.csv"] {
            assert!(run_dir.join(sub).join(file).exists(), "{sub}/{file}");
        }
    }
    // histogram mass equals the replication count
    let csv = std::fs::read_to_string(run_dir.join("exponent-2").join("histogram.csv")).unwrap();
    let mass: u64 = csv
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1) == Some("1"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(mass, 30);
    std::fs::remove_dir_all(&out).unwrap();
}
