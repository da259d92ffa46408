use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    alternating_from_one_step, least_squares_signal, one_step_estimate, oracle_permutation_estimate,
};
use crate::experiments::config::{EstimatorKind, ExperimentConfig, SignalSpec};
use crate::matrix::DenseMatrix;
use crate::metrics::{hamming_distance, logdet_ratio, relative_signal_error, Snr};
use crate::model::{build_canonical_signal, synthesize_instance_with, DistributionKind};
use crate::rng::trial_seed;

/// `σ = sqrt(‖B‖_F² / (m · snr))`, the noise level giving the target ratio.
pub fn sigma_for_snr(b: &DenseMatrix<f64>, m: usize, target_snr: f64) -> Result<f64> {
    if !(target_snr > 0.0) || !target_snr.is_finite() {
        return Err(Error::invalid(format!("target snr must be positive and finite, got {target_snr}")));
    }
    if m == 0 {
        return Err(Error::invalid("measurement count m must be positive"));
    }
    if b.is_zero() {
        return Err(Error::invalid("signal is zero; no noise level reaches a finite snr"));
    }
    Ok((b.frobenius_norm_sq() / (m as f64 * target_snr)).sqrt())
}

fn sigma_for(b: &DenseMatrix<f64>, m: usize, point: Snr<f64>) -> Result<f64> {
    match point {
        Snr::Noiseless => Ok(0.0),
        Snr::Finite(s) => sigma_for_snr(b, m, s),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub exact: bool,
    pub hamming: usize,
    pub rel_b_error: f64,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    Completed(TrialResult),
    /// The estimator returned an error; excluded from aggregates.
    Failed {
        seed: u64,
        error: String,
    },
}

impl TrialOutcome {
    pub fn completed(&self) -> Option<&TrialResult> {
        match self {
            TrialOutcome::Completed(r) => Some(r),
            TrialOutcome::Failed { .. } => None,
        }
    }
}

pub fn signal_for(config: &ExperimentConfig) -> Result<DenseMatrix<f64>> {
    let SignalSpec::Canonical { scale } = config.signal;
    build_canonical_signal(config.p, config.m, scale)
}

/// One trial at grid point `grid_index`, seeded by `trial_seed(master_seed, grid_index, trial_index)`.
pub fn run_trial(config: &ExperimentConfig, grid_index: usize, trial_index: usize) -> Result<TrialOutcome> {
    config.validate()?;
    let point = *config
        .snr_grid
        .get(grid_index)
        .ok_or_else(|| Error::invalid(format!("grid index {grid_index} out of range")))?;
    let b = signal_for(config)?;
    let sigma = sigma_for(&b, config.m, point)?;
    Ok(trial_at(config, &b, sigma, grid_index, trial_index))
}

fn trial_at(config: &ExperimentConfig, b: &DenseMatrix<f64>, sigma: f64, grid: usize, trial: usize) -> TrialOutcome {
    let seed = trial_seed(config.master_seed, grid as u64, trial as u64);
    let started = Instant::now();
    let run = || -> Result<TrialResult> {
        let inst = synthesize_instance_with(
            config.n,
            config.p,
            config.m,
            config.h,
            config.dist,
            config.unit_variance,
            b,
            sigma,
            seed,
        )?;
        let (perm_hat, b_hat) = match config.estimator {
            EstimatorKind::OneStep => {
                let r = one_step_estimate(&inst.x, &inst.y)?;
                (r.perm_hat, r.b_hat)
            }
            EstimatorKind::OraclePerm => {
                let perm = oracle_permutation_estimate(&inst.x, &inst.y, &inst.b_true)?;
                let b_hat = least_squares_signal(&inst.x, &inst.y, &perm)?;
                (perm, b_hat)
            }
            EstimatorKind::AltMin { max_iters } => {
                let r = alternating_from_one_step(&inst.x, &inst.y, max_iters)?.result;
                (r.perm_hat, r.b_hat)
            }
        };
        let hamming = hamming_distance(&perm_hat, &inst.perm_true)?;
        Ok(TrialResult {
            exact: hamming == 0,
            hamming,
            rel_b_error: relative_signal_error(&b_hat, &inst.b_true)?,
            runtime_ms: 0.0,
        })
    };
    match run() {
        Ok(mut r) => {
            r.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
            TrialOutcome::Completed(r)
        }
        Err(e) => TrialOutcome::Failed { seed, error: e.to_string() },
    }
}

/// Aggregate over the trials of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub h: usize,
    pub dist: DistributionKind,
    pub estimator: String,
    pub snr: Snr<f64>,
    pub sigma: f64,
    /// `None` at the noiseless point.
    pub logdet_ratio: Option<f64>,
    pub recovery_rate: f64,
    pub mean_hamming: f64,
    pub mean_rel_b_error: f64,
    pub trials: usize,
    pub failed: usize,
    pub seed: u64,
}

impl SweepRow {
    /// Binomial standard error of the recovery rate.
    pub fn rate_standard_error(&self) -> f64 {
        let k = (self.trials - self.failed).max(1) as f64;
        (self.recovery_rate * (1.0 - self.recovery_rate) / k).sqrt()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Runs every grid point on the configured thread count.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    match config.threads {
        Some(t) => run_sweep_with_threads(config, t),
        None => run_sweep_on_current_pool(config),
    }
}

/// Runs on a dedicated pool of `threads` workers. Output does not depend on `threads`.
pub fn run_sweep_with_threads(config: &ExperimentConfig, threads: usize) -> Result<SweepResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_sweep_on_current_pool(config))
}

fn run_sweep_on_current_pool(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let b = signal_for(config)?;
    let sigmas = config.snr_grid.iter().map(|&s| sigma_for(&b, config.m, s)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..config.snr_grid.len()).flat_map(|g| (0..config.trials).map(move |t| (g, t))).collect();
    // Collected in job order regardless of scheduling.
    let outcomes: Vec<TrialOutcome> = jobs.par_iter().map(|&(g, t)| trial_at(config, &b, sigmas[g], g, t)).collect();

    let mut rows = Vec::with_capacity(config.snr_grid.len());
    for (g, chunk) in outcomes.chunks(config.trials).enumerate() {
        let done: Vec<&TrialResult> = chunk.iter().filter_map(TrialOutcome::completed).collect();
        let k = done.len() as f64;
        let mean = |f: &dyn Fn(&TrialResult) -> f64| {
            if done.is_empty() {
                f64::NAN
            } else {
                done.iter().map(|r| f(r)).sum::<f64>() / k
            }
        };
        let sigma = sigmas[g];
        rows.push(SweepRow {
            n: config.n,
            p: config.p,
            m: config.m,
            h: config.h,
            dist: config.dist,
            estimator: config.estimator.name().to_string(),
            snr: config.snr_grid[g],
            sigma,
            logdet_ratio: if sigma > 0.0 { Some(logdet_ratio(&b, sigma, config.n)?) } else { None },
            recovery_rate: mean(&|r| if r.exact { 1.0 } else { 0.0 }),
            mean_hamming: mean(&|r| r.hamming as f64),
            mean_rel_b_error: mean(&|r| r.rel_b_error),
            trials: config.trials,
            failed: chunk.len() - done.len(),
            seed: config.master_seed,
        });
    }
    Ok(SweepResult { rows })
}
