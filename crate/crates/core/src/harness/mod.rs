//! Experiment configuration, parallel trial execution, empirical
//! distributions, two-sample tests and output.

mod config;
mod empirical;
mod evaluate;
mod gfun;
mod ks;
mod recipes;
mod runner;

pub use config::{EnsembleRef, ExperimentConfig, IndexRule, Statistic, Thresholds};
pub use empirical::{summarize, EmpiricalDistribution, Summary, SUMMARY_QUANTILES};
pub use evaluate::{evaluate, ExperimentSummary, FailureNote, GroupSummary, Verdict};
pub use gfun::{GSpec, MAX_DERIVATIVE};
pub use ks::{ks_coefficient, ks_two_sample, KsResult, MIN_KS_SAMPLES};
pub use recipes::{
    a_scale_radius, four_moment_compare, gap_tail_experiment, gap_tail_frequency, FourMomentResult,
    GapTailResult, Side,
};
pub use runner::{
    compute_trial, effective_entry_bound, format_value, gap_at, run_experiment, run_trials, write_records_csv,
    ExperimentRun, RunOptions, Stat, TrialRecord, CSV_HEADER,
};
