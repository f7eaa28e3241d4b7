//! Library surface of the banditlab CLI: figure runners, verification
//! suites, run manifests, and SVG rendering. The binary in main.rs is a thin
//! argument-parsing layer over these.

pub mod commands;
pub mod figures;
pub mod manifest;
pub mod suites;
pub mod svg;

pub use commands::{
    cmd_coupling, cmd_histogram_figure, cmd_ratio_figure, cmd_recursion, cmd_rerun, cmd_verify,
    CmdOutcome, VerifyConfig,
};
pub use figures::{
    run_coupling, run_histogram_figure, run_ratio_figure, run_recursion, CouplingRunConfig,
    HarnessError, HistogramFigureConfig, RatioFigureConfig, RecursionRunConfig,
};
pub use manifest::{create_run_dir, default_out_base, RunManifest, RunStatus, MANIFEST_FILE};
pub use suites::{run_suite, SuiteOptions, SuiteOutcome, SUITE_NAMES};
