//! Permutation recovery for linear regression with shuffled labels.
//!
//! Observations follow `Y = Π X B + W` with an unknown row permutation `Π`.
//! The one-step estimator recovers `Π` from a single linear assignment
//! solve on `Y Yᵀ X Xᵀ` and then fits `B` by least squares. The crate also
//! provides the oracle baselines, an alternating-minimization baseline,
//! signal diagnostics, and a seeded Monte-Carlo sweep harness.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the experiment harness and
//! the CLI use.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod instrument;
pub mod lap;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod permutation;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use estimators::{
    alternating_from_one_step, alternating_minimization, build_onestep_cost, build_onestep_cost_with,
    least_squares_signal, one_step_estimate, oracle_permutation_estimate, reduce_known_direction, AltMinOutcome,
    AltMinStep, CostAssociation, EstimationResult, LeastSquaresSolver,
};
pub use lap::{lap_brute_force, lap_maximize, lap_maximize_outer, Assignment};
pub use matrix::DenseMatrix;
pub use metrics::{
    classify_regime, classify_regime_with, exact_recovery, hamming_distance, logdet, logdet_ratio,
    minimax_logdet_threshold, relative_signal_error, snr, stable_rank, Regime, RegimeLabel, RegimeThresholds, Snr,
};
pub use model::{
    build_canonical_signal, sample_design_matrix, sample_design_matrix_with, sample_permutation_with_hamming_weight,
    synthesize_instance, synthesize_instance_with, DistributionKind, ProblemInstance,
};
pub use permutation::{apply_permutation, Permutation};
pub use scalar::Real;

pub type Matrix = DenseMatrix<f64>;
pub type Matrix32 = DenseMatrix<f32>;
pub type Instance = ProblemInstance<f64>;
pub type Estimate = EstimationResult<f64>;
pub type LapAssignment = Assignment<f64>;
pub type SignalToNoise = Snr<f64>;
