//! Monte-Carlo sweeps over noise levels, their CSV output, and the
//! alternating-minimization stagnation demo.

pub mod config;
pub mod csv;
pub mod demo;
pub mod sweep;

pub use config::{logspace, parse_snr_grid, EstimatorKind, ExperimentConfig, SignalSpec};
pub use csv::{format_sig12, parse_csv, read_csv, to_csv_string, write_csv, CSV_HEADER};
pub use demo::{reproduce_failure_demo, trace_to_csv, DemoStep};
pub use sweep::{
    run_sweep, run_sweep_with_threads, run_trial, sigma_for_snr, SweepResult, SweepRow, TrialOutcome, TrialResult,
};
