//! Scalar diagnostics for permutations and signals.

use std::cmp::Ordering;
use std::fmt;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, singular_values};
use crate::matrix::DenseMatrix;
use crate::permutation::Permutation;
use crate::scalar::Real;

/// Number of positions where the two maps disagree.
pub fn hamming_distance(a: &Permutation, b: &Permutation) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("permutations of length {} and {}", a.len(), b.len())));
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).filter(|(x, y)| x != y).count())
}

pub fn exact_recovery(estimate: &Permutation, truth: &Permutation) -> bool {
    estimate == truth
}

/// `‖B‖_F² / ‖B‖_op²`
pub fn stable_rank<T: Real>(b: &DenseMatrix<T>) -> Result<T> {
    if b.is_zero() {
        return Err(Error::invalid("stable rank of the zero matrix is undefined"));
    }
    let op = operator_norm(b);
    Ok(b.frobenius_norm_sq() / (op * op))
}

/// Signal-to-noise ratio; `σ = 0` is the distinguished noiseless value,
/// ordered above every finite ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Snr<T> {
    Finite(T),
    Noiseless,
}

impl<T: Real> Snr<T> {
    pub fn is_noiseless(&self) -> bool {
        matches!(self, Snr::Noiseless)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Snr::Finite(v) => Some(v),
            Snr::Noiseless => None,
        }
    }

    /// `+∞` for the noiseless marker.
    pub fn as_f64(&self) -> f64 {
        match *self {
            Snr::Finite(v) => v.as_f64(),
            Snr::Noiseless => f64::INFINITY,
        }
    }
}

impl<T: Real> PartialOrd for Snr<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Snr::Noiseless, Snr::Noiseless) => Some(Ordering::Equal),
            (Snr::Noiseless, Snr::Finite(_)) => Some(Ordering::Greater),
            (Snr::Finite(_), Snr::Noiseless) => Some(Ordering::Less),
            (Snr::Finite(a), Snr::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Real> fmt::Display for Snr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Snr::Finite(v) => write!(f, "{v}"),
            Snr::Noiseless => f.write_str("noiseless"),
        }
    }
}

/// `‖B‖_F² / (m σ²)`
pub fn snr<T: Real>(b: &DenseMatrix<T>, m: usize, sigma: T) -> Result<Snr<T>> {
    if m == 0 {
        return Err(Error::invalid("measurement count m must be positive"));
    }
    if !(sigma >= T::zero()) {
        return Err(Error::invalid(format!("noise level must be non-negative, got {sigma}")));
    }
    if sigma == T::zero() {
        return Ok(Snr::Noiseless);
    }
    Ok(Snr::Finite(b.frobenius_norm_sq() / (T::lit(m as f64) * sigma * sigma)))
}

/// `logdet(I + BᵀB/σ²) = Σᵢ log(1 + sᵢ²/σ²)` over the singular values of `B`.
pub fn logdet<T: Real>(b: &DenseMatrix<T>, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(Error::invalid(format!("log-det needs a positive noise level, got {sigma}")));
    }
    let s2 = sigma * sigma;
    Ok(singular_values(b).into_iter().map(|s| (s * s / s2).ln_1p()).sum())
}

/// `logdet(I + BᵀB/σ²) / log n`
pub fn logdet_ratio<T: Real>(b: &DenseMatrix<T>, sigma: T, n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::invalid(format!("log-det ratio needs n >= 2, got {n}")));
    }
    Ok(logdet(b, sigma)? / T::lit(n as f64).ln())
}

/// `(log n! - 2) / n`: below this log-det value no estimator recovers the
/// permutation with probability above one half.
pub fn minimax_logdet_threshold(n: usize) -> f64 {
    assert!(n >= 1, "threshold needs n >= 1");
    (ln_gamma(n as f64 + 1.0) - 2.0) / n as f64
}

/// `‖B̂ - B‖_F / ‖B‖_F`
pub fn relative_signal_error<T: Real>(b_hat: &DenseMatrix<T>, b_true: &DenseMatrix<T>) -> Result<T> {
    if b_hat.shape() != b_true.shape() {
        return Err(Error::invalid(format!(
            "shapes {}x{} and {}x{} differ",
            b_hat.rows(),
            b_hat.cols(),
            b_true.rows(),
            b_true.cols()
        )));
    }
    if b_true.is_zero() {
        return Err(Error::invalid("reference signal is zero"));
    }
    Ok(b_hat.sub(b_true)?.frobenius_norm() / b_true.frobenius_norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Unknown,
    Hard,
    Medium,
    Easy,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Unknown => "unknown",
            Regime::Hard => "hard",
            Regime::Medium => "medium",
            Regime::Easy => "easy",
        })
    }
}

/// Stable-rank boundaries: Hard from `c0`, Medium from `c1·log n`, Easy
/// from `c2·(log n)⁴`, all left-closed, natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeThresholds {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { c0: 2.0, c1: 1.0, c2: 1.0 }
    }
}

/// Regime tag with the numeric boundaries it was classified against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeLabel {
    pub tag: Regime,
    pub hard_from: f64,
    pub medium_from: f64,
    pub easy_from: f64,
}

pub fn classify_regime(srank: f64, n: usize) -> RegimeLabel {
    classify_regime_with(srank, n, &RegimeThresholds::default())
}

pub fn classify_regime_with(srank: f64, n: usize, t: &RegimeThresholds) -> RegimeLabel {
    let log_n = (n as f64).ln();
    let hard_from = t.c0;
    let medium_from = t.c1 * log_n;
    let easy_from = t.c2 * log_n.powi(4);
    let tag = if srank >= easy_from {
        Regime::Easy
    } else if srank >= medium_from {
        Regime::Medium
    } else if srank >= hard_from {
        Regime::Hard
    } else {
        Regime::Unknown
    };
    RegimeLabel { tag, hard_from, medium_from, easy_from }
}
