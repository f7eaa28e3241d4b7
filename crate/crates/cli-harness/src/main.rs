use clap::{Parser, Subcommand, ValueEnum};
use cli_harness::{
    cmd_coupling, cmd_histogram_figure, cmd_ratio_figure, cmd_recursion, cmd_rerun, cmd_verify,
    default_out_base, CmdOutcome, CouplingRunConfig, HarnessError, HistogramFigureConfig,
    RatioFigureConfig, RecursionRunConfig, SuiteOptions, VerifyConfig, SUITE_NAMES,
};
use std::path::PathBuf;
use std::process::ExitCode;

use bandit_core::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Ucb,
    Ts,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Ucb => Algorithm::Ucb,
            AlgoArg::Ts => Algorithm::Ts,
        }
    }
}

/// Bandit limit-theorem lab: desk-scale figure reproduction and verification
/// suites for Gaussian-tuned Thompson sampling and UCB.
#[derive(Parser)]
#[command(name = "banditlab", version, about)]
struct Cli {
    /// Base output directory (default: $BANDITLAB_OUT or ./runs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Histograms of sub-optimal arm plays per tail exponent (UCB default).
    Fig1 {
        #[arg(long, value_enum, default_value = "ucb")]
        algo: AlgoArg,
        /// Negative tail exponents, mapped to design variances |e|*sigma0^2.
        #[arg(long, value_delimiter = ',', default_values_t = [-2.0, -3.0, -4.0, -5.0], allow_hyphen_values = true)]
        exponents: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Same histograms for Thompson sampling.
    Fig2 {
        #[arg(long, value_enum, default_value = "ts")]
        algo: AlgoArg,
        #[arg(long, value_delimiter = ',', default_values_t = [-2.0, -3.0, -4.0, -5.0], allow_hyphen_values = true)]
        exponents: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Observed/CLT-predicted regret ratio curves over a horizon grid.
    Fig3 {
        #[arg(long, value_delimiter = ',', default_values_t = [2000u64, 5000, 10_000, 20_000, 50_000])]
        horizons: Vec<u64>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Ucb, AlgoArg::Ts])]
        algos: Vec<AlgoArg>,
        #[arg(long, value_delimiter = ',', default_values_t = [-1.0, -2.0, -5.0], allow_hyphen_values = true)]
        exponents: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run verification suites; exit code 1 if any suite fails.
    Verify {
        /// Comma-separated suite names; defaults to all of them.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
        /// Override each suite's default replication/draw count.
        #[arg(long)]
        reps: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Per-epoch sandwich diagnostics on two-armed TS trajectories.
    Coupling {
        /// Arm means of a Gaussian environment with unit variances.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5])]
        means: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Sandwich epsilon; defaults to 0.96 of the admissible sup.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact play-time recursion check on two-armed UCB trajectories.
    Recursion {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5])]
        means: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Re-execute a run from its manifest; outputs are byte-identical.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn dispatch(cli: Cli) -> Result<CmdOutcome, HarnessError> {
    let out_base = cli.out.unwrap_or_else(default_out_base);
    match cli.command {
        Command::Fig1 {
            algo,
            exponents,
            horizon,
            reps,
            seed,
            workers,
        } => cmd_histogram_figure(
            "fig1",
            &HistogramFigureConfig {
                algo: algo.into(),
                exponents,
                horizon,
                reps,
                seed,
                gap: 0.3,
                workers,
            },
            &out_base,
        ),
        Command::Fig2 {
            algo,
            exponents,
            horizon,
            reps,
            seed,
            workers,
        } => cmd_histogram_figure(
            "fig2",
            &HistogramFigureConfig {
                algo: algo.into(),
                exponents,
                horizon,
                reps,
                seed,
                gap: 0.3,
                workers,
            },
            &out_base,
        ),
        Command::Fig3 {
            horizons,
            algos,
            exponents,
            reps,
            seed,
            workers,
        } => cmd_ratio_figure(
            &RatioFigureConfig {
                algos: algos.into_iter().map(Into::into).collect(),
                exponents,
                horizons,
                reps,
                seed,
                gap: 0.7,
                workers,
            },
            &out_base,
        ),
        Command::Verify {
            suites,
            reps,
            seed,
            workers,
        } => cmd_verify(
            &VerifyConfig {
                suites: suites
                    .unwrap_or_else(|| SUITE_NAMES.iter().map(|s| s.to_string()).collect()),
                options: SuiteOptions {
                    seed,
                    reps,
                    workers,
                },
            },
            &out_base,
        ),
        Command::Coupling {
            means,
            sigma,
            eps,
            horizon,
            reps,
            seed,
        } => cmd_coupling(
            &CouplingRunConfig {
                means,
                sigma,
                eps,
                horizon,
                reps,
                seed,
            },
            &out_base,
        ),
        Command::Recursion {
            means,
            sigma,
            horizon,
            reps,
            seed,
        } => cmd_recursion(
            &RecursionRunConfig {
                means,
                sigma,
                horizon,
                reps,
                seed,
            },
            &out_base,
        ),
        Command::Rerun { manifest, workers } => cmd_rerun(&manifest, workers, &out_base),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(outcome) => {
            eprintln!("run directory: {}", outcome.run_dir.display());
            if outcome.verification_failed {
                eprintln!("verification FAILED");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) if e.is_usage() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
