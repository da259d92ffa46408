//! The stagnation example: p = 2, m = 1, `β = [1000; 1000]`, no noise.

use crate::error::{Error, Result};
use crate::estimators::alternating_from_one_step;
use crate::matrix::DenseMatrix;
use crate::model::{synthesize_instance, DistributionKind};

pub const DEMO_COEFFICIENT: f64 = 1000.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DemoStep {
    pub iteration: usize,
    pub hamming: usize,
    pub residual: f64,
}

/// Number of displaced rows in the demo instance: every row (a uniformly
/// random derangement).
pub fn demo_displaced_rows(n: usize) -> usize {
    n
}

/// One-step estimate (iteration 0) followed by `max_iters` alternating
/// iterations; the trace always has `max_iters + 1` entries. Once the
/// permutation repeats the iteration is at a fixed point and the remaining
/// entries repeat the last state.
pub fn reproduce_failure_demo(n: usize, max_iters: usize, seed: u64) -> Result<Vec<DemoStep>> {
    if n < 100 {
        return Err(Error::invalid(format!("the demo needs n >= 100, got {n}")));
    }
    let beta = DenseMatrix::from_rows(&[[DEMO_COEFFICIENT], [DEMO_COEFFICIENT]])?;
    let inst = synthesize_instance(n, 2, 1, demo_displaced_rows(n), DistributionKind::Gaussian, &beta, 0.0, seed)?;
    let outcome = alternating_from_one_step(&inst.x, &inst.y, max_iters)?;
    let hamming = outcome.hamming_trace(&inst.perm_true)?;
    let mut steps: Vec<DemoStep> = outcome
        .trace
        .iter()
        .zip(hamming)
        .map(|(s, h)| DemoStep { iteration: s.iteration, hamming: h, residual: s.residual })
        .collect();
    while steps.len() < max_iters + 1 {
        let last = steps.last().expect("iteration 0 is always traced").clone();
        steps.push(DemoStep { iteration: last.iteration + 1, ..last });
    }
    Ok(steps)
}

pub const TRACE_HEADER: &str = "iteration,hamming,residual";

pub fn trace_to_csv(steps: &[DemoStep]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for s in steps {
        out.push_str(&format!("{},{},{}\n", s.iteration, s.hamming, super::csv::format_sig12(s.residual)));
    }
    out
}
