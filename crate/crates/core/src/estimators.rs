//! Permutation and signal estimators.
//!
//! The one-step estimator solves a single assignment problem on the cost
//! `Y Yᵀ X Xᵀ`, i.e. the oracle cost `Y Bᵀ Xᵀ` with the unknown signal
//! replaced by `Xᵀ Y`, and then fits the signal by least squares on the
//! unshuffled observations. It needs neither the noise level nor the number
//! of permuted rows.

use crate::error::{Error, Result};
use crate::instrument;
use crate::lap::{lap_maximize, lap_maximize_outer, Assignment};
use crate::linalg::{check_full_column_rank, complete_orthonormal_basis, Qr};
use crate::matrix::DenseMatrix;
use crate::metrics::hamming_distance;
use crate::permutation::Permutation;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct EstimationResult<T> {
    pub perm_hat: Permutation,
    pub b_hat: DenseMatrix<T>,
    /// Assignment objective `⟨Π̂, C⟩` achieved on the last cost matrix.
    pub objective: T,
    pub iterations: usize,
}

/// Factored design for repeated least-squares solves against the same `X`.
#[derive(Clone, Debug)]
pub struct LeastSquaresSolver<T> {
    qr: Qr<T>,
}

impl<T: Real> LeastSquaresSolver<T> {
    /// Factors `x`; fails if `n < p` or `σ_min(X) < 1e-10·σ_max(X)`.
    pub fn new(x: &DenseMatrix<T>) -> Result<Self> {
        if x.rows() < x.cols() {
            return Err(Error::invalid(format!(
                "need n >= p for least squares, got n = {}, p = {}",
                x.rows(),
                x.cols()
            )));
        }
        let qr = Qr::new(x)?;
        check_full_column_rank(&qr)?;
        Ok(Self { qr })
    }

    /// `argmin_B ‖Πᵀ Y - X B‖_F`
    pub fn solve_unshuffled(&self, y: &DenseMatrix<T>, perm: &Permutation) -> Result<DenseMatrix<T>> {
        let unshuffled = perm.inverse().apply(y)?;
        instrument::count_ls_solve();
        self.qr.solve_least_squares(&unshuffled)
    }
}

/// How `Y Yᵀ X Xᵀ` is associated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostAssociation {
    /// `(Y Yᵀ)(X Xᵀ)`: n²(m + p) + n³ flops
    Gram,
    /// `(Y (Yᵀ X)) Xᵀ`: 2nmp + n²p flops
    SignalFirst,
    /// `Y (X (Xᵀ Y))ᵀ`: 2nmp + n²m flops
    ResponseFirst,
}

impl CostAssociation {
    pub fn cheapest(n: usize, p: usize, m: usize) -> Self {
        let (n, p, m) = (n as u128, p as u128, m as u128);
        let gram = n * n * (m + p) + n * n * n;
        let signal = 2 * n * m * p + n * n * p;
        let response = 2 * n * m * p + n * n * m;
        if signal <= response && signal <= gram {
            CostAssociation::SignalFirst
        } else if response <= gram {
            CostAssociation::ResponseFirst
        } else {
            CostAssociation::Gram
        }
    }
}

fn check_rows<T: Real>(x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<()> {
    if x.rows() != y.rows() {
        return Err(Error::invalid(format!("X has {} rows but Y has {}", x.rows(), y.rows())));
    }
    Ok(())
}

/// n×n cost `C = Y Yᵀ X Xᵀ`, so that `⟨Π, C⟩ = Σᵢ C[i, π(i)]`.
pub fn build_onestep_cost<T: Real>(x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    check_rows(x, y)?;
    build_onestep_cost_with(x, y, CostAssociation::cheapest(x.rows(), x.cols(), y.cols()))
}

pub fn build_onestep_cost_with<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    assoc: CostAssociation,
) -> Result<DenseMatrix<T>> {
    check_rows(x, y)?;
    match assoc {
        CostAssociation::Gram => y.matmul_t(y)?.matmul(&x.matmul_t(x)?),
        CostAssociation::SignalFirst => {
            // row i of Y·(YᵀX) is the direction-weighted observation
            let yx = y.t_matmul(x)?;
            y.matmul(&yx)?.matmul_t(x)
        }
        CostAssociation::ResponseFirst => {
            let xty = x.t_matmul(y)?;
            y.matmul_t(&x.matmul(&xty)?)
        }
    }
}

/// One assignment solve on `Y Yᵀ X Xᵀ`, then least squares on the unshuffled `Y`.
pub fn one_step_estimate<T: Real>(x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<EstimationResult<T>> {
    check_rows(x, y)?;
    let solver = LeastSquaresSolver::new(x)?;
    let assignment = if y.cols() == 1 {
        // C = y (X Xᵀ y)ᵀ has rank one
        let w = x.matmul(&x.t_matmul(y)?)?;
        lap_maximize_outer(y.as_slice(), w.as_slice())?
    } else {
        lap_maximize(&build_onestep_cost(x, y)?)?
    };
    let b_hat = solver.solve_unshuffled(y, &assignment.perm)?;
    Ok(EstimationResult { perm_hat: assignment.perm, b_hat, objective: assignment.objective, iterations: 1 })
}

/// Oracle cost `Y (X B)ᵀ` for a known signal.
pub fn oracle_cost<T: Real>(x: &DenseMatrix<T>, y: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    check_rows(x, y)?;
    if b.rows() != x.cols() || b.cols() != y.cols() {
        return Err(Error::invalid(format!("signal is {}x{}, expected {}x{}", b.rows(), b.cols(), x.cols(), y.cols())));
    }
    y.matmul_t(&x.matmul(b)?)
}

/// `argmax_Π ⟨Π, Y Bᵀ Xᵀ⟩` with the true signal supplied.
pub fn oracle_permutation_estimate<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    b_true: &DenseMatrix<T>,
) -> Result<Permutation> {
    Ok(oracle_assignment(x, y, b_true)?.perm)
}

fn oracle_assignment<T: Real>(x: &DenseMatrix<T>, y: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<Assignment<T>> {
    if y.cols() == 1 && b.rows() == x.cols() && b.cols() == 1 {
        check_rows(x, y)?;
        return lap_maximize_outer(y.as_slice(), x.matmul(b)?.as_slice());
    }
    lap_maximize(&oracle_cost(x, y, b)?)
}

/// `argmin_B ‖Πᵀ Y - X B‖_F` with the permutation supplied.
pub fn least_squares_signal<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    perm: &Permutation,
) -> Result<DenseMatrix<T>> {
    check_rows(x, y)?;
    LeastSquaresSolver::new(x)?.solve_unshuffled(y, perm)
}

/// `‖Y - Π X B‖_F`
pub fn residual_norm<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    perm: &Permutation,
    b: &DenseMatrix<T>,
) -> Result<T> {
    Ok(y.sub(&perm.apply(&x.matmul(b)?)?)?.frobenius_norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AltMinStep<T> {
    pub iteration: usize,
    pub perm: Permutation,
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct AltMinOutcome<T> {
    pub result: EstimationResult<T>,
    pub trace: Vec<AltMinStep<T>>,
    /// True when the last iteration reproduced the previous permutation.
    pub converged: bool,
}

impl<T: Real> AltMinOutcome<T> {
    /// Hamming distance of every traced permutation to `truth`.
    pub fn hamming_trace(&self, truth: &Permutation) -> Result<Vec<usize>> {
        self.trace.iter().map(|s| hamming_distance(&s.perm, truth)).collect()
    }
}

/// Alternates `Π ← argmax ⟨Π, Y B̂ᵀ Xᵀ⟩` and `B̂ ← LS(X, Πᵀ Y)` starting
/// from `init_b`. Traced iterations are numbered from 1. Stops after
/// `max_iters` or as soon as the permutation repeats.
pub fn alternating_minimization<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    init_b: &DenseMatrix<T>,
    max_iters: usize,
) -> Result<AltMinOutcome<T>> {
    check_rows(x, y)?;
    let solver = LeastSquaresSolver::new(x)?;
    alternate(x, y, &solver, init_b.clone(), None, Vec::new(), max_iters)
}

/// Runs the one-step estimator, records it as iteration 0, then alternates
/// from its output for up to `max_iters` further iterations.
pub fn alternating_from_one_step<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    max_iters: usize,
) -> Result<AltMinOutcome<T>> {
    let start = one_step_estimate(x, y)?;
    let solver = LeastSquaresSolver::new(x)?;
    let residual = residual_norm(x, y, &start.perm_hat, &start.b_hat)?;
    let trace = vec![AltMinStep { iteration: 0, perm: start.perm_hat.clone(), residual }];
    let mut outcome = alternate(x, y, &solver, start.b_hat.clone(), Some(start.perm_hat.clone()), trace, max_iters)?;
    if max_iters == 0 {
        outcome.result = start;
    }
    Ok(outcome)
}

fn alternate<T: Real>(
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    solver: &LeastSquaresSolver<T>,
    mut b: DenseMatrix<T>,
    mut prev: Option<Permutation>,
    mut trace: Vec<AltMinStep<T>>,
    max_iters: usize,
) -> Result<AltMinOutcome<T>> {
    let mut result = None;
    let mut converged = false;
    for t in 1..=max_iters {
        let assignment = oracle_assignment(x, y, &b)?;
        b = solver.solve_unshuffled(y, &assignment.perm)?;
        let residual = residual_norm(x, y, &assignment.perm, &b)?;
        trace.push(AltMinStep { iteration: t, perm: assignment.perm.clone(), residual });
        let repeated = prev.as_ref() == Some(&assignment.perm);
        prev = Some(assignment.perm.clone());
        result = Some(EstimationResult {
            perm_hat: assignment.perm,
            b_hat: b.clone(),
            objective: assignment.objective,
            iterations: t,
        });
        if repeated {
            converged = true;
            break;
        }
    }
    let result = match result {
        Some(r) => r,
        None => EstimationResult {
            perm_hat: prev.unwrap_or_else(|| Permutation::identity(x.rows())),
            b_hat: b,
            objective: T::zero(),
            iterations: 0,
        },
    };
    Ok(AltMinOutcome { result, trace, converged })
}

/// `X e` as an n×1 matrix: the first column of `X Q` for an orthonormal `Q`
/// whose first column is the known unit direction `e`.
pub fn reduce_known_direction<T: Real>(x: &DenseMatrix<T>, e: &[T]) -> Result<DenseMatrix<T>> {
    if e.len() != x.cols() {
        return Err(Error::invalid(format!("direction has length {}, X has {} columns", e.len(), x.cols())));
    }
    let q = complete_orthonormal_basis(e)?;
    let first = DenseMatrix::column_vector(&q.column(0))?;
    x.matmul(&first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn cost_of_ones_is_all_ones() {
        let ones = mat(&[&[1.0], &[1.0]]);
        let c = build_onestep_cost(&ones, &ones).unwrap();
        // YYᵀXXᵀ = J·J = 2J for two ones; the all-ones shape is what matters.
        assert!(c.as_slice().iter().all(|&v| v == c[(0, 0)]));
        let unit = mat(&[&[1.0]]);
        assert_eq!(build_onestep_cost(&unit, &unit).unwrap()[(0, 0)], 1.0);
    }

    #[test]
    fn one_by_one_cost() {
        let c = build_onestep_cost(&mat(&[&[3.0]]), &mat(&[&[-2.0]])).unwrap();
        assert_eq!(c[(0, 0)], 36.0);
    }

    #[test]
    fn row_mismatch_rejected() {
        let x = DenseMatrix::<f64>::zeros(3, 1);
        let y = DenseMatrix::<f64>::zeros(2, 1);
        assert!(build_onestep_cost(&x, &y).is_err());
        assert!(one_step_estimate(&x, &y).is_err());
        let wide = DenseMatrix::<f64>::identity(2);
        let wide = DenseMatrix::from_fn(2, 3, |i, j| wide[(i, j.min(1))]).unwrap();
        assert!(matches!(one_step_estimate(&wide, &DenseMatrix::zeros(2, 1)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rank_deficient_design_rejected() {
        let x = mat(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]);
        let y = mat(&[&[1.0], &[2.0], &[3.0]]);
        assert!(matches!(one_step_estimate(&x, &y), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn identity_design_least_squares() {
        let y = mat(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = least_squares_signal(&DenseMatrix::identity(2), &y, &Permutation::identity(2)).unwrap();
        assert!(b.sub(&y).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn known_direction_along_first_axis() {
        let x = mat(&[&[1.0, 2.0], &[3.0, 4.0], &[-5.0, 6.0]]);
        let r = reduce_known_direction(&x, &[1.0, 0.0]).unwrap();
        assert_eq!(r.column(0), x.column(0));
        assert!(reduce_known_direction(&x, &[1.0, 1.0]).is_err());
        assert!(reduce_known_direction(&x, &[1.0]).is_err());
    }

    #[test]
    fn associations_pick_cheapest() {
        assert_eq!(CostAssociation::cheapest(500, 50, 50), CostAssociation::SignalFirst);
        assert_eq!(CostAssociation::cheapest(500, 50, 5), CostAssociation::ResponseFirst);
    }
}
