//! Dense factorizations: Householder QR least squares, one-sided Jacobi
//! singular values, power iteration and Gram-Schmidt basis completion.

use crate::error::{Error, Result};
use crate::instrument;
use crate::matrix::{dot, DenseMatrix};
use crate::scalar::Real;

/// Relative threshold on `σ_min / σ_max` below which a design is rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Above this dimension the operator norm switches from a full SVD to power iteration.
pub const SVD_DIMENSION_LIMIT: usize = 2000;

/// Householder QR of a tall matrix, stored column by column.
#[derive(Clone, Debug)]
pub struct Qr<T> {
    rows: usize,
    /// Column `k` holds `R[..=k, k]` above the diagonal and the Householder
    /// vector (implicit unit head) below it.
    cols: Vec<Vec<T>>,
    /// Householder scalars `τ` with `H = I - τ v vᵀ`.
    tau: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> Qr<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let (n, p) = a.shape();
        if n < p {
            return Err(Error::invalid(format!("QR needs rows >= cols, got {n}x{p}")));
        }
        let mut cols: Vec<Vec<T>> = (0..p).map(|j| a.column(j)).collect();
        let mut tau = vec![T::zero(); p];
        let mut diag = vec![T::zero(); p];
        for k in 0..p {
            let (head, tail) = cols.split_at_mut(k + 1);
            let col = &mut head[k];
            let norm = col[k..].iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm == T::zero() {
                tau[k] = T::zero();
                diag[k] = T::zero();
                continue;
            }
            let alpha = if col[k] > T::zero() { -norm } else { norm };
            let v0 = col[k] - alpha;
            for v in &mut col[k + 1..] {
                *v /= v0;
            }
            tau[k] = -v0 / alpha;
            diag[k] = alpha;
            col[k] = T::one();
            for other in tail.iter_mut() {
                reflect(&col[k..], tau[k], &mut other[k..]);
            }
            col[k] = alpha;
        }
        Ok(Self { rows: n, cols, tau, diag })
    }

    /// Diagonal of `R`.
    pub fn r_diagonal(&self) -> &[T] {
        &self.diag
    }

    /// Upper-triangular factor as a p×p matrix.
    pub fn r(&self) -> DenseMatrix<T> {
        let p = self.cols.len();
        let mut r = DenseMatrix::zeros(p, p);
        for j in 0..p {
            for i in 0..j {
                r[(i, j)] = self.cols[j][i];
            }
            r[(j, j)] = self.diag[j];
        }
        r
    }

    fn apply_qt(&self, b: &mut [T]) {
        for (k, col) in self.cols.iter().enumerate() {
            if self.tau[k] == T::zero() {
                continue;
            }
            // v = (1, col[k+1..])
            let mut s = b[k];
            s += dot(&col[k + 1..], &b[k + 1..]);
            s *= self.tau[k];
            b[k] -= s;
            for (bi, &vi) in b[k + 1..].iter_mut().zip(&col[k + 1..]) {
                *bi -= s * vi;
            }
        }
    }

    /// `argmin_B ‖A B - rhs‖_F`, one back substitution per column of `rhs`.
    pub fn solve_least_squares(&self, rhs: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if rhs.rows() != self.rows {
            return Err(Error::dims(format!(
                "right-hand side has {} rows, factorization has {}",
                rhs.rows(),
                self.rows
            )));
        }
        let p = self.cols.len();
        let m = rhs.cols();
        let mut out = DenseMatrix::zeros(p, m);
        for j in 0..m {
            let mut b = rhs.column(j);
            self.apply_qt(&mut b);
            for i in (0..p).rev() {
                let mut s = b[i];
                for k in i + 1..p {
                    s -= self.cols[k][i] * out[(k, j)];
                }
                if self.diag[i] == T::zero() {
                    return Err(Error::RankDeficient { condition: f64::INFINITY, ratio: 0.0 });
                }
                out[(i, j)] = s / self.diag[i];
            }
        }
        Ok(out)
    }
}

fn reflect<T: Real>(v: &[T], tau: T, x: &mut [T]) {
    let s = dot(v, x) * tau;
    for (xi, &vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

/// Fails with a condition estimate when `σ_min(A) < tol · σ_max(A)`.
pub fn check_full_column_rank<T: Real>(qr: &Qr<T>) -> Result<()> {
    let sv = singular_values(&qr.r());
    let (max, min) = match (sv.first(), sv.last()) {
        (Some(&a), Some(&b)) => (a.as_f64(), b.as_f64()),
        _ => return Ok(()),
    };
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if !(ratio >= RANK_TOLERANCE) {
        return Err(Error::RankDeficient { condition: ratio.recip(), ratio });
    }
    Ok(())
}

/// Least squares `argmin_B ‖A B - rhs‖_F` with a numerical rank check on `A`.
pub fn least_squares<T: Real>(a: &DenseMatrix<T>, rhs: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if a.rows() < a.cols() {
        return Err(Error::invalid(format!("least squares needs n >= p, got n = {}, p = {}", a.rows(), a.cols())));
    }
    if a.rows() != rhs.rows() {
        return Err(Error::dims(format!("design has {} rows, response has {}", a.rows(), rhs.rows())));
    }
    instrument::count_ls_solve();
    let qr = Qr::new(a)?;
    check_full_column_rank(&qr)?;
    qr.solve_least_squares(rhs)
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values<T: Real>(a: &DenseMatrix<T>) -> Vec<T> {
    let (r, c) = a.shape();
    // Rotate the narrower side so there are min(r, c) columns.
    let mut cols: Vec<Vec<T>> =
        if c <= r { (0..c).map(|j| a.column(j)).collect() } else { (0..r).map(|i| a.row(i).to_vec()).collect() };
    let k = cols.len();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let (lo, hi) = cols.split_at_mut(j);
                let (ci, cj) = (&mut lo[i], &mut hi[0]);
                let alpha = dot(ci, ci);
                let beta = dot(cj, cj);
                let gamma = dot(ci, cj);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = (T::one() + t * t).sqrt().recip();
                let sn = cs * t;
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let (xv, yv) = (*x, *y);
                    *x = cs * xv - sn * yv;
                    *y = sn * xv + cs * yv;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

/// Largest singular value by power iteration on `AᵀA`, to relative tolerance `tol`.
pub fn operator_norm_power<T: Real>(a: &DenseMatrix<T>, tol: T, max_iters: usize) -> T {
    let (r, c) = a.shape();
    if r == 0 || c == 0 || a.is_zero() {
        return T::zero();
    }
    // Deterministic start with no special alignment to coordinate axes.
    let mut v: Vec<T> = (0..c).map(|j| T::one() + T::lit(((j * 7919) % 97) as f64 / 97.0)).collect();
    normalize(&mut v);
    let mut estimate = T::zero();
    for _ in 0..max_iters {
        let av: Vec<T> = (0..r).map(|i| dot(a.row(i), &v)).collect();
        let mut w = vec![T::zero(); c];
        for (i, &s) in av.iter().enumerate() {
            for (wj, &aij) in w.iter_mut().zip(a.row(i)) {
                *wj += s * aij;
            }
        }
        let lambda = dot(&w, &w).sqrt();
        if lambda == T::zero() {
            return T::zero();
        }
        for x in &mut w {
            *x /= lambda;
        }
        v = w;
        let next = lambda.sqrt();
        if (next - estimate).abs() <= tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Largest singular value: Jacobi SVD up to [`SVD_DIMENSION_LIMIT`], power iteration beyond.
pub fn operator_norm<T: Real>(a: &DenseMatrix<T>) -> T {
    let (r, c) = a.shape();
    if r.min(c) <= SVD_DIMENSION_LIMIT && r.max(c) <= SVD_DIMENSION_LIMIT {
        singular_values(a).first().copied().unwrap_or_else(T::zero)
    } else {
        operator_norm_power(a, T::lit(1e-12).max(T::epsilon() * T::lit(16.0)), 100_000)
    }
}

fn normalize<T: Real>(v: &mut [T]) {
    let norm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Orthonormal p×p matrix whose first column is the unit vector `e`,
/// completed by modified Gram-Schmidt against the canonical basis.
pub fn complete_orthonormal_basis<T: Real>(e: &[T]) -> Result<DenseMatrix<T>> {
    let p = e.len();
    if p == 0 {
        return Err(Error::invalid("direction must be non-empty"));
    }
    let norm = dot(e, e).sqrt();
    if !((norm - T::one()).abs().as_f64() <= 1e-10) {
        return Err(Error::invalid(format!("direction must have unit norm, got {norm}")));
    }
    let mut basis: Vec<Vec<T>> = vec![e.to_vec()];
    // Try canonical vectors in order of least overlap with e.
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| e[a].abs().partial_cmp(&e[b].abs()).expect("finite direction"));
    for k in order {
        if basis.len() == p {
            break;
        }
        let mut v = vec![T::zero(); p];
        v[k] = T::one();
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for q in &basis {
                let s = dot(q, &v);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi -= s * qi;
                }
            }
        }
        let len = dot(&v, &v).sqrt();
        if len > T::lit(1e-6) {
            for x in &mut v {
                *x /= len;
            }
            basis.push(v);
        }
    }
    debug_assert_eq!(basis.len(), p);
    Ok(DenseMatrix::from_raw(p, p, (0..p).flat_map(|i| basis.iter().map(move |col| col[i])).collect::<Vec<T>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn least_squares_on_identity_design_returns_rhs() {
        let y = mat(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        let b = least_squares(&DenseMatrix::identity(3), &y).unwrap();
        for (a, e) in b.as_slice().iter().zip(y.as_slice()) {
            assert!((a - e).abs() < 1e-14);
        }
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        // x = [1 0; 1 1; 1 2], y = [1; 2; 4] -> slope 1.5, intercept 5/6
        let x = mat(&[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
        let y = mat(&[&[1.0], &[2.0], &[4.0]]);
        let b = least_squares(&x, &y).unwrap();
        assert!((b[(0, 0)] - 5.0 / 6.0).abs() < 1e-14);
        assert!((b[(1, 0)] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_is_detected() {
        let x = mat(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        let y = mat(&[&[1.0], &[2.0], &[3.0]]);
        assert!(matches!(least_squares(&x, &y), Err(Error::RankDeficient { .. })));
        assert!(least_squares(&mat(&[&[1.0, 2.0]]), &mat(&[&[1.0]])).is_err());
    }

    #[test]
    fn singular_values_of_known_matrices() {
        let sv = singular_values(&mat(&[&[2.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(sv, vec![2.0, 1.0]);
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5).
        let sv = singular_values(&mat(&[&[3.0, 0.0], &[4.0, 5.0]]));
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((sv[1] - 5f64.sqrt()).abs() < 1e-13);
        let wide = singular_values(&mat(&[&[3.0, 4.0, 0.0]]));
        assert_eq!(wide.len(), 1);
        assert!((wide[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let a = mat(&[&[1.0, 2.0, 0.5], &[-1.0, 0.3, 2.0], &[0.2, 0.1, -0.7], &[1.5, -2.0, 0.0]]);
        let svd = singular_values(&a)[0];
        let pow = operator_norm_power(&a, 1e-14, 100_000);
        assert!((svd - pow).abs() <= 1e-8 * svd);
    }

    #[test]
    fn basis_completion_is_orthonormal() {
        let e = [0.6, 0.0, -0.8];
        let q = complete_orthonormal_basis(&e).unwrap();
        assert_eq!(q.column(0), e.to_vec());
        let qtq = q.t_matmul(&q).unwrap();
        let eye = DenseMatrix::<f64>::identity(3);
        assert!(qtq.sub(&eye).unwrap().max_abs() < 1e-12);
        assert!(complete_orthonormal_basis(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn qr_r_factor_reproduces_gram_matrix() {
        let a = mat(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 0.5], &[2.0, 1.0]]);
        let r = Qr::new(&a).unwrap().r();
        let lhs = r.t_matmul(&r).unwrap();
        let rhs = a.t_matmul(&a).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }
}
