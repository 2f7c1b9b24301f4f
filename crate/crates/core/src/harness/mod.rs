//! Experiment harness: inequality checkers, rate fits, the named-check
//! registry, example reproductions and report output.

mod checks;
mod config;
mod constants;
mod examples;
mod output;
mod rate;
mod registry;
mod report;

pub use checks::{
    check_lower_estimate, check_upper_estimate, dyadic_sum_bound, nodes_and_scale, omega_tilde, realization_check,
    series_bound_check, CheckSetting, SERIES_TAIL_FLAG,
};
pub use config::{
    ExperimentConfig, ExperimentKind, ExperimentOutput, FamilyConfig, ModuliRecord, OperatorRecord, SteklovRecord,
};
pub use constants::Constants;
pub use examples::{
    example3_case, reproduce_example, Example3Case, ExampleReport, ExampleRow, EXAMPLE1_N, EXAMPLE1_P, EXAMPLE2_N,
    EXAMPLE3_CASES, EXAMPLE3_W,
};
pub use output::{write_rows_csv, write_summary_json, CheckSummary, ReportSummary, Summary};
pub use rate::{fit_decay, FitStatus, RateReport, MIN_FIT_OCTAVES, MIN_FIT_SAMPLES};
pub use registry::{calibrate, check_ids, jackson_rows, verify, verify_all, CheckOutcome, INTERPOLATION_TOLERANCE};
pub use report::{Bound, InequalityReport, Row, Verdict, FROZEN_SLACK, LITERAL_SLACK, ZERO_LEVEL};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SMOOTHNESS_LAB_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`]. Later calls, or a pool
/// that is already running, leave the existing pool in place.
pub fn init_thread_pool() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
